use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pfs_core::{Encoding, Exec};
use pfs_tool::{
    cmd_audit_links, cmd_create, cmd_edit, cmd_extract, cmd_list, cmd_verify, BuildOptions,
    EditAction, ExtractOptions, RemoteRule, ToolError,
};

#[derive(Parser)]
#[command(
    name = "pfsutil",
    version,
    about = "Create, inspect and unpack PFS wrappers"
)]
struct Cli {
    /// Run per-entity work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Raw,
    Uuencode,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Raw => Encoding::Raw,
            EncodingArg::Uuencode => Encoding::Uuencode,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a wrapper from a directory tree.
    Create {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "raw")]
        encoding: EncodingArg,
        /// GLOB=BASEURL; matching files become remote entities.
        #[arg(long, value_name = "GLOB=BASEURL")]
        remote: Vec<String>,
        #[arg(long, value_name = "GLOB")]
        include: Vec<String>,
        #[arg(long)]
        overwrite: bool,
    },
    /// One line per entity: path, storage, length, created, url.
    List {
        file: PathBuf,
    },
    Extract {
        file: PathBuf,
        #[arg(long)]
        dest: PathBuf,
        #[arg(long)]
        fetch_remote: bool,
        #[arg(long)]
        overwrite: bool,
    },
    /// Add a local file as an embedded entity.
    Add {
        file: PathBuf,
        #[arg(long)]
        from: PathBuf,
        #[arg(long = "as", value_name = "INTERIOR")]
        interior: String,
        #[arg(long, value_enum, default_value = "raw")]
        encoding: EncodingArg,
    },
    AddRemote {
        file: PathBuf,
        #[arg(long)]
        url: String,
        #[arg(long = "as", value_name = "INTERIOR")]
        interior: String,
        #[arg(long)]
        length: u64,
    },
    Remove {
        file: PathBuf,
        interior: String,
    },
    Verify {
        file: PathBuf,
    },
    /// Report absolute links in embedded HTML entities.
    AuditLinks {
        file: PathBuf,
        #[arg(long)]
        host: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    match run(cli.command, exec) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pfsutil: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, exec: Exec) -> Result<ExitCode, ToolError> {
    match command {
        Command::Create {
            root,
            out,
            encoding,
            remote,
            include,
            overwrite,
        } => {
            let mut opts = BuildOptions::new(root);
            opts.default_encoding = encoding.into();
            opts.remote_rules = remote
                .iter()
                .map(|r| RemoteRule::parse(r))
                .collect::<Result<_, _>>()?;
            opts.include_globs = include;
            opts.overwrite = overwrite;
            opts.exec = exec;
            let s = cmd_create(&opts, &out)?;
            println!(
                "{}: {} entities ({} embedded, {} remote), {} bytes",
                out.display(),
                s.entity_count,
                s.embedded_count,
                s.remote_count,
                s.bytes_written
            );
        }
        Command::List { file } => {
            for row in cmd_list(&file)? {
                println!("{row}");
            }
        }
        Command::Extract {
            file,
            dest,
            fetch_remote,
            overwrite,
        } => {
            let mut opts = ExtractOptions::new(dest);
            opts.fetch_remote = fetch_remote;
            opts.overwrite = overwrite;
            opts.exec = exec;
            let s = cmd_extract(&file, &opts)?;
            println!(
                "written {}, fetched {}, skipped remote {}",
                s.written, s.fetched, s.skipped_remote
            );
        }
        Command::Add {
            file,
            from,
            interior,
            encoding,
        } => {
            let action = EditAction::AddEmbedded {
                file: from,
                interior,
                encoding: encoding.into(),
            };
            let s = cmd_edit(&file, &action)?;
            println!("{}: {} entities", file.display(), s.entity_count);
        }
        Command::AddRemote {
            file,
            url,
            interior,
            length,
        } => {
            let action = EditAction::AddRemote {
                url,
                interior,
                length,
            };
            let s = cmd_edit(&file, &action)?;
            println!("{}: {} entities", file.display(), s.entity_count);
        }
        Command::Remove { file, interior } => {
            let s = cmd_edit(&file, &EditAction::Remove { interior })?;
            println!("{}: {} entities", file.display(), s.entity_count);
        }
        Command::Verify { file } => {
            let outcome = cmd_verify(&file, exec)?;
            for issue in &outcome.issues {
                println!("{issue}");
            }
            if !outcome.ok() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::AuditLinks { file, host } => {
            for record in cmd_audit_links(&file, &host)? {
                println!("{record}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
