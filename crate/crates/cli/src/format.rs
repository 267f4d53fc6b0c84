//! Number formatting and plain-text tables.

/// `x` rounded to `digits` significant digits, without trailing zeros.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Round in scientific form first so the exponent reflects any carry.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return format!("{}e{exp}", trim(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}"))
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Six significant digits, the precision used in human-readable tables.
pub fn num(x: f64) -> String {
    sig(x, 6)
}

/// Left-aligned text columns, two spaces apart; numeric columns right-aligned.
pub fn columns(header: &[&str], rows: &[Vec<String>], numeric: &[bool]) -> String {
    let n = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = (0..n)
            .map(|i| {
                if numeric.get(i).copied().unwrap_or(false) {
                    format!("{:>w$}", cells[i], w = width[i])
                } else {
                    format!("{:<w$}", cells[i], w = width[i])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}
