use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, Context};
use whitehead_core::{parse_tree, LabeledTree};

use crate::Failure;

/// `-` reads stdin; an argument starting with `(` or a digit is taken
/// literally; anything else is a file path.
pub fn read_arg(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")
            .map_err(Failure::Input)?;
        return Ok(s);
    }
    if arg.starts_with('(') || arg.starts_with(|c: char| c.is_ascii_digit()) {
        return Ok(arg.to_string());
    }
    read_file(Path::new(arg))
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        return read_arg("-");
    }
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Input)
}

pub fn read_tree(arg: &str) -> Result<LabeledTree, Failure> {
    let text = read_arg(arg)?;
    parse_tree(text.trim()).map_err(|e| Failure::Input(anyhow!("parsing tree {}: {e}", short(arg))))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Input)
}

fn short(arg: &str) -> String {
    if arg.len() > 40 {
        format!("'{}...'", &arg[..arg.floor_char_boundary(40)])
    } else {
        format!("'{arg}'")
    }
}
