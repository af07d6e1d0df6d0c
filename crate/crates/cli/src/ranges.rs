//! Integer list syntax shared by `--N` and `--seeds`: comma-separated items,
//! each a single value or an inclusive range `a..b` with optional `:step`.

pub fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(format!("empty item in {s:?}"));
        }
        let (range, step) = match item.split_once(':') {
            Some((r, st)) => (r, st.parse::<u64>().map_err(|e| format!("step {st:?}: {e}"))?),
            None => (item, 1),
        };
        if step == 0 {
            return Err(format!("zero step in {item:?}"));
        }
        match range.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
                let b: u64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
                if a > b {
                    return Err(format!("empty range {item:?}"));
                }
                out.extend((a..=b).step_by(step as usize));
            }
            None if step == 1 => out.push(range.parse().map_err(|e| format!("{range:?}: {e}"))?),
            None => return Err(format!("a step needs a range in {item:?}")),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("8..16:4").unwrap(), vec![8, 12, 16]);
        assert_eq!(parse_list("3,1,2..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_list("0..19").unwrap().len(), 20);
        assert!(parse_list("5..2").is_err());
        assert!(parse_list("4:2").is_err());
        assert!(parse_list("").is_err());
    }
}
