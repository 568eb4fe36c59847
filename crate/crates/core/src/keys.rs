//! Tag keys and section markers of the wrapper text format.

pub const MAGIC: &str = "PFS!";
pub const ENTITY: &str = "[ENTITY]";
pub const DATA: &str = "[DATA]";

pub const VERSION: &str = "version";
pub const DATE: &str = "date";

pub const ORIGINAL_NAME: &str = "originalname";
pub const LONG_NAME: &str = "longname";
pub const SHORT_NAME: &str = "shortname";
pub const DIR_NAME: &str = "dirname";
pub const CREATED: &str = "created";
pub const LENGTH: &str = "length";
pub const STORED_LENGTH: &str = "storedlength";
pub const ORIGIN: &str = "origin";
pub const DESCRIPTION: &str = "description";
pub const REMOTE_READ_HOST: &str = "remotereadhost";
pub const MODE: &str = "mode";
pub const STORAGE: &str = "storage";
pub const ENCODING: &str = "encoding";

pub const HEADER_KEYS: [&str; 2] = [VERSION, DATE];

/// Entity keys in the order the writer emits them.
pub const ENTITY_KEYS: [&str; 13] = [
    ORIGINAL_NAME,
    LONG_NAME,
    SHORT_NAME,
    DIR_NAME,
    CREATED,
    LENGTH,
    STORED_LENGTH,
    ORIGIN,
    DESCRIPTION,
    REMOTE_READ_HOST,
    MODE,
    STORAGE,
    ENCODING,
];
