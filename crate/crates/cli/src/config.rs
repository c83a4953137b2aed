//! `key = value` config files, merged into argv ahead of the user's own
//! flags so that flags on the command line win.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Command};

/// Options taking a value at the top level; their values are skipped when
/// looking for the subcommand name.
const GLOBAL_VALUED: [&str; 4] = ["--seed", "--out", "--format", "--config"];

pub fn parse_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`, got {raw:?}", i + 1);
        };
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        pairs.push((key, value));
    }
    Ok(pairs)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
        if s == "--" {
            break;
        }
    }
    None
}

fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if GLOBAL_VALUED.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if !s.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn given_on_command_line(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefixed = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefixed)
    })
}

fn push_pair(out: &mut Vec<OsString>, arg: &clap::Arg, key: &str, value: &str) -> Result<()> {
    match arg.get_action() {
        ArgAction::SetTrue => match value {
            "true" | "1" | "yes" => out.push(format!("--{key}").into()),
            "false" | "0" | "no" => {}
            _ => bail!("config key {key}: expected true or false, got {value:?}"),
        },
        _ => {
            out.push(format!("--{key}").into());
            out.push(value.into());
        }
    }
    Ok(())
}

/// Returns argv with the config file's settings spliced in: global keys
/// directly after the program name, subcommand keys directly after the
/// subcommand. Keys belonging to other subcommands are ignored; keys no
/// command knows are an error.
pub fn merge(cmd: &Command, args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let pairs = parse_file(&text).with_context(|| format!("in {}", path.display()))?;

    let sub_pos = subcommand_position(&args);
    let sub = sub_pos.and_then(|i| cmd.find_subcommand(args[i].to_string_lossy().as_ref()));
    let mut globals = Vec::new();
    let mut locals = Vec::new();
    for (key, value) in &pairs {
        if key == "config" {
            bail!("config files cannot include other config files");
        }
        if let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(key)) {
            if !given_on_command_line(&args, key) {
                push_pair(&mut globals, arg, key, value)?;
            }
            continue;
        }
        let known = cmd
            .get_subcommands()
            .any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)));
        if !known {
            bail!("unknown config key {key:?}");
        }
        let Some(sub) = sub else { continue };
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key)) else {
            continue;
        };
        let overridden = given_on_command_line(&args, key)
            || sub
                .get_arg_conflicts_with(arg)
                .iter()
                .filter_map(|c| c.get_long())
                .any(|l| given_on_command_line(&args, l));
        if !overridden {
            push_pair(&mut locals, arg, key, value)?;
        }
    }

    let mut merged = Vec::with_capacity(args.len() + globals.len() + locals.len());
    merged.push(args[0].clone());
    merged.extend(globals);
    match sub_pos {
        Some(i) => {
            merged.extend(args[1..=i].iter().cloned());
            merged.extend(locals);
            merged.extend(args[i + 1..].iter().cloned());
        }
        None => merged.extend(args[1..].iter().cloned()),
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let pairs = parse_file("# header\nflip_prob = 0.2 # trailing\n\nseed=4\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("flip-prob".into(), "0.2".into()),
                ("seed".into(), "4".into())
            ]
        );
        assert!(parse_file("seed 4").is_err());
    }
}
