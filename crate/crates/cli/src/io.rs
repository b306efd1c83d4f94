//! Text formats read and written by the command line.
//!
//! * Tournament files use the `TOURN 1 <n>` format of the core crate.
//! * Pairs files hold one `x y` line per terminal pair.
//! * Paths files hold one path per line as space-separated vertex ids.
//!
//! Blank lines are ignored in pairs and paths files.

use std::fs;
use std::path::Path as FsPath;

use tlink::{Path, Tournament};

use crate::Failure;

pub fn read_text(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_tournament(path: &FsPath) -> Result<Tournament, Failure> {
    Tournament::parse(&read_text(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty())
}

fn parse_ids(line: &str, lineno: usize) -> Result<Vec<usize>, Failure> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Failure::Input(format!("line {lineno}: {tok:?} is not a vertex id")))
        })
        .collect()
}

pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, Failure> {
    let pairs = numbered_lines(text)
        .map(|(lineno, line)| match parse_ids(line, lineno)?.as_slice() {
            &[x, y] => Ok((x, y)),
            other => Err(Failure::Input(format!(
                "line {lineno}: expected two ids, found {}",
                other.len()
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pairs.is_empty() {
        return Err(Failure::Input("pairs file has no pairs".into()));
    }
    Ok(pairs)
}

pub fn parse_paths(text: &str) -> Result<Vec<Path>, Failure> {
    numbered_lines(text)
        .map(|(lineno, line)| parse_ids(line, lineno).map(Path::new))
        .collect()
}

pub fn format_paths(paths: &[Path]) -> String {
    let mut out = String::new();
    for p in paths {
        let ids: Vec<String> = p.vertices().iter().map(usize::to_string).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&FsPath>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
