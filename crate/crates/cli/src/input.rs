use std::path::Path;

use anyhow::{bail, Context, Result};
use nilwitness_core::cocycle::SigmaSeq;
use nilwitness_core::linalg::Prime;

use crate::SeqArgs;

/// Inline text, `@path`, or a path to an existing file.
pub fn inline_or_file(text: &str) -> Result<String> {
    if let Some(path) = text.strip_prefix('@') {
        return std::fs::read_to_string(path).with_context(|| format!("reading {path}"));
    }
    let trimmed = text.trim_start();
    if !trimmed.starts_with('{') && Path::new(text).is_file() {
        return std::fs::read_to_string(text).with_context(|| format!("reading {text}"));
    }
    Ok(text.to_string())
}

pub fn prime(p: u32) -> Result<Prime> {
    Ok(Prime::new(p)?)
}

pub fn parse_seq(p: Prime, tokens: &[String]) -> Result<SigmaSeq> {
    let text = inline_or_file(&tokens.join(" "))?;
    SigmaSeq::parse(p, &text).with_context(|| format!("malformed sequence {:?}", tokens.join(" ")))
}

pub enum SeqInput {
    S(SigmaSeq),
    Sigma(SigmaSeq),
}

pub fn seq_input(args: &SeqArgs) -> Result<SeqInput> {
    let p = prime(args.p)?;
    match (&args.s, &args.sigma) {
        (Some(s), None) => Ok(SeqInput::S(parse_seq(p, s)?)),
        (None, Some(sigma)) => Ok(SeqInput::Sigma(parse_seq(p, sigma)?)),
        _ => bail!("give exactly one of --s or --sigma"),
    }
}

/// `-4,-8,-16`.
pub fn parse_schedule(text: &str) -> Result<Vec<i64>> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().with_context(|| format!("bad schedule entry {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        bail!("the window schedule is empty");
    }
    Ok(values)
}

/// `d=1 M=4`.
pub fn parse_witness(tokens: &[String]) -> Result<(u64, usize)> {
    let (mut d, mut m) = (None, None);
    for token in tokens.iter().flat_map(|t| t.split_whitespace()) {
        let (key, value) = token.split_once('=').with_context(|| format!("expected key=value, got {token:?}"))?;
        match key {
            "d" => d = Some(value.parse().with_context(|| format!("bad d {value:?}"))?),
            "M" | "m" => m = Some(value.parse().with_context(|| format!("bad M {value:?}"))?),
            _ => bail!("unknown witness parameter {key:?}"),
        }
    }
    match (d, m) {
        (Some(d), Some(m)) => Ok((d, m)),
        _ => bail!("--witness needs both d= and M="),
    }
}

/// Basis exponents: `0,2` or `lo..hi`.
pub fn parse_basis(text: &str) -> Result<Vec<i64>> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: i64 = lo.trim().parse().with_context(|| format!("bad window {text:?}"))?;
        let hi: i64 = hi.trim().parse().with_context(|| format!("bad window {text:?}"))?;
        if lo > hi {
            bail!("empty window {text:?}");
        }
        return Ok((lo..=hi).collect());
    }
    let basis = text
        .split(',')
        .map(|t| t.trim().parse::<i64>().with_context(|| format!("bad basis exponent {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    if basis.is_empty() {
        bail!("empty basis");
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_and_witness_tokens() {
        assert_eq!(parse_schedule("-4, -8,-16").unwrap(), vec![-4, -8, -16]);
        assert!(parse_schedule("").is_err());
        assert!(parse_schedule("-4,x").is_err());
        assert_eq!(parse_witness(&["d=1".into(), "M=4".into()]).unwrap(), (1, 4));
        assert_eq!(parse_witness(&["d=2 m=3".into()]).unwrap(), (2, 3));
        assert!(parse_witness(&["d=1".into()]).is_err());
        assert!(parse_witness(&["e=1".into(), "M=1".into()]).is_err());
    }

    #[test]
    fn bases() {
        assert_eq!(parse_basis("0,2").unwrap(), vec![0, 2]);
        assert_eq!(parse_basis("-1..1").unwrap(), vec![-1, 0, 1]);
        assert!(parse_basis("2..1").is_err());
        assert!(parse_basis("a").is_err());
    }

    #[test]
    fn sequences_split_across_tokens() {
        let p = prime(2).unwrap();
        let s = parse_seq(p, &["prefix=[1,0]".into(), "period=[1]".into()]).unwrap();
        assert_eq!(s.prefix(), &[1, 0]);
        assert!(parse_seq(p, &["prefix=[1]".into()]).is_err());
    }
}
