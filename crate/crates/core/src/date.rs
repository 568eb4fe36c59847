//! Date and timestamp text forms used by wrapper tags.
//!
//! The legacy forms are `DD-MM-YY` for dates and `DD-MM-YY H:MM:SS AM` for
//! timestamps. Two-digit years pivot at 70. Values outside 1970..=2069 are
//! written as ISO 8601 so they survive a round trip.

use chrono::{Datelike, NaiveDate, NaiveDateTime, NaiveTime, Timelike};

const PIVOT: i32 = 70;

fn in_legacy_window(year: i32) -> bool {
    (1970..=2069).contains(&year)
}

fn expand_year(two: u32) -> i32 {
    let two = two as i32;
    if two >= PIVOT {
        1900 + two
    } else {
        2000 + two
    }
}

fn digits(s: &str, min: usize, max: usize) -> Option<u32> {
    if s.len() < min || s.len() > max || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_legacy_date(s: &str) -> Option<NaiveDate> {
    let mut parts = s.split('-');
    let day = digits(parts.next()?, 1, 2)?;
    let month = digits(parts.next()?, 1, 2)?;
    let year = digits(parts.next()?, 2, 2)?;
    if parts.next().is_some() {
        return None;
    }
    NaiveDate::from_ymd_opt(expand_year(year), month, day)
}

fn parse_iso_date(s: &str) -> Option<NaiveDate> {
    let mut parts = s.split('-');
    let year = digits(parts.next()?, 4, 4)?;
    let month = digits(parts.next()?, 2, 2)?;
    let day = digits(parts.next()?, 2, 2)?;
    if parts.next().is_some() {
        return None;
    }
    NaiveDate::from_ymd_opt(year as i32, month, day)
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    parse_legacy_date(s).or_else(|| parse_iso_date(s))
}

pub fn format_date(date: NaiveDate) -> String {
    if in_legacy_window(date.year()) {
        format!(
            "{:02}-{:02}-{:02}",
            date.day(),
            date.month(),
            date.year().rem_euclid(100)
        )
    } else {
        format!("{:04}-{:02}-{:02}", date.year(), date.month(), date.day())
    }
}

fn parse_hms(s: &str, hour_digits: (usize, usize)) -> Option<(u32, u32, u32)> {
    let mut parts = s.split(':');
    let h = digits(parts.next()?, hour_digits.0, hour_digits.1)?;
    let m = digits(parts.next()?, 2, 2)?;
    let sec = digits(parts.next()?, 2, 2)?;
    if parts.next().is_some() {
        return None;
    }
    Some((h, m, sec))
}

fn parse_legacy_timestamp(s: &str) -> Option<NaiveDateTime> {
    let mut fields = s.split_whitespace();
    let date = parse_legacy_date(fields.next()?)?;
    let (h12, m, sec) = parse_hms(fields.next()?, (1, 2))?;
    let meridiem = fields.next()?;
    if fields.next().is_some() || !(1..=12).contains(&h12) {
        return None;
    }
    let hour = match meridiem.to_ascii_uppercase().as_str() {
        "AM" => h12 % 12,
        "PM" => h12 % 12 + 12,
        _ => return None,
    };
    Some(date.and_time(NaiveTime::from_hms_opt(hour, m, sec)?))
}

fn parse_iso_timestamp(s: &str) -> Option<NaiveDateTime> {
    let (date, time) = s.split_once(['T', ' '])?;
    let date = parse_iso_date(date)?;
    let (h, m, sec) = parse_hms(time, (2, 2))?;
    Some(date.and_time(NaiveTime::from_hms_opt(h, m, sec)?))
}

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    parse_legacy_timestamp(s).or_else(|| parse_iso_timestamp(s))
}

pub fn format_timestamp(ts: NaiveDateTime) -> String {
    if in_legacy_window(ts.year()) {
        let (pm, h12) = ts.hour12();
        format!(
            "{} {}:{:02}:{:02} {}",
            format_date(ts.date()),
            h12,
            ts.minute(),
            ts.second(),
            if pm { "PM" } else { "AM" }
        )
    } else {
        format!(
            "{}T{:02}:{:02}:{:02}",
            format_date(ts.date()),
            ts.hour(),
            ts.minute(),
            ts.second()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn sample_header_date() {
        assert_eq!(parse_date("25-06-97"), Some(ymd(1997, 6, 25)));
        assert_eq!(format_date(ymd(1997, 6, 25)), "25-06-97");
    }

    #[test]
    fn pivot_at_seventy() {
        assert_eq!(parse_date("01-01-70"), Some(ymd(1970, 1, 1)));
        assert_eq!(parse_date("31-12-69"), Some(ymd(2069, 12, 31)));
        assert_eq!(parse_date("01-01-00"), Some(ymd(2000, 1, 1)));
    }

    #[test]
    fn sample_created_timestamp() {
        let ts = parse_timestamp("14-08-95 6:00:00 AM").unwrap();
        assert_eq!(ts, ymd(1995, 8, 14).and_hms_opt(6, 0, 0).unwrap());
        assert_eq!(format_timestamp(ts), "14-08-95 6:00:00 AM");
    }

    #[test]
    fn noon_and_midnight() {
        let noon = ymd(2001, 2, 3).and_hms_opt(12, 5, 9).unwrap();
        let midnight = ymd(2001, 2, 3).and_hms_opt(0, 0, 0).unwrap();
        assert_eq!(format_timestamp(noon), "03-02-01 12:05:09 PM");
        assert_eq!(format_timestamp(midnight), "03-02-01 12:00:00 AM");
        assert_eq!(parse_timestamp("03-02-01 12:05:09 PM"), Some(noon));
        assert_eq!(parse_timestamp("03-02-01 12:00:00 AM"), Some(midnight));
    }

    #[test]
    fn iso_accepted_and_used_outside_window() {
        assert_eq!(parse_date("2024-02-29"), Some(ymd(2024, 2, 29)));
        assert_eq!(format_date(ymd(1950, 1, 2)), "1950-01-02");
        let ts = ymd(2100, 7, 8).and_hms_opt(23, 59, 1).unwrap();
        assert_eq!(format_timestamp(ts), "2100-07-08T23:59:01");
        assert_eq!(parse_timestamp("2100-07-08T23:59:01"), Some(ts));
        assert_eq!(parse_timestamp("2100-07-08 23:59:01"), Some(ts));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_date("32-01-97"), None);
        assert_eq!(parse_date("1-1-1997"), None);
        assert_eq!(parse_timestamp("14-08-95 13:00:00 PM"), None);
        assert_eq!(parse_timestamp("14-08-95 6:00:00"), None);
    }
}
