use num_rational::Ratio;

/// Exact degree in `[0, 1]`.
pub type Degree = Ratio<u64>;

const SCALE: u128 = 1_000_000;

/// Six fractional digits, rounded half to even.
pub fn decimal6(value: &Degree) -> String {
    let numer = *value.numer() as u128 * SCALE;
    let denom = *value.denom() as u128;
    let mut scaled = numer / denom;
    let twice_rem = 2 * (numer % denom);
    if twice_rem > denom || (twice_rem == denom && scaled % 2 == 1) {
        scaled += 1;
    }
    format!("{}.{:06}", scaled / SCALE, scaled % SCALE)
}

/// The JSON number for a degree: the [`decimal6`] text read back as `f64`,
/// so `2/3` serializes as `0.666667` and `1` as `1.0`.
pub fn json_number(value: &Degree) -> f64 {
    decimal6(value).parse().expect("decimal text parses")
}

/// Short human form: `1`, `0`, or `2/3 (0.666667)`.
pub fn display(value: &Degree) -> String {
    if value.is_integer() {
        value.to_integer().to_string()
    } else {
        format!("{}/{} ({})", value.numer(), value.denom(), decimal6(value))
    }
}
