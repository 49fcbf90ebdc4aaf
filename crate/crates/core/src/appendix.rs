//! The published Σ_k^± lists for type {3,7} over the first 400 primes
//! p ≡ ±1 mod 7, verbatim, with a table of typographical errata. Each
//! erratum carries a mechanical justification checked by [`Erratum::justify`].

use std::collections::BTreeMap;

use crate::numkit;

/// One published list: primes with exactly `k` inner maps and p ≡ `sign` mod 7.
#[derive(Debug, Clone, Copy)]
pub struct SigmaList {
    pub k: usize,
    pub sign: i8,
    /// The "(N primes)" count printed after the list.
    pub printed_count: usize,
    pub primes: &'static [u64],
}

impl SigmaList {
    pub fn label(&self) -> String {
        format!("Sigma_{}^{}", self.k, if self.sign > 0 { '+' } else { '-' })
    }

    /// Key matching [`crate::density::SweepResult::sigma_lists`].
    pub fn key(&self) -> (usize, String) {
        (self.k, if self.sign > 0 { "+1".into() } else { "-1".into() })
    }
}

const SIGMA_0_PLUS: &[u64] = &[
    239, 379, 491, 547, 1051, 1583, 2143, 3319, 3823, 3907, 4159, 4271, 4523, 4663, 5503,
    5867, 5923, 6427, 6959, 7043, 8443, 9227,
];

const SIGMA_0_MINUS: &[u64] = &[
    167, 251, 1399, 1511, 1931, 1987, 2351, 3023, 3331, 3359, 4003, 4283, 4339, 4759, 4871,
    5179, 5683, 6803, 7307, 8623, 8707, 9043, 9127, 9239, 9491, 9631,
];

const SIGMA_1_PLUS: &[u64] = &[
    29, 113, 197, 281, 337, 421, 449, 617, 673, 757, 953, 1009, 1429, 1597, 1709, 1877,
    1933, 2017, 2129, 2213, 2269, 2297, 2381, 2437, 2633, 2801, 2857, 2969, 3109, 3137,
    3221, 3361, 3389, 3529, 3613, 3697, 4201, 4229, 4621, 4649, 4733, 4817, 4957, 5153,
    5209, 5237, 5573, 5657, 5741, 5881, 6133, 6217, 6301, 6329, 6469, 6553, 6581, 6637,
    7001, 7057, 7309, 7393, 7561, 7589, 8093, 8233, 8317, 8429, 8597, 8681, 8693, 8821,
    9157, 9241, 9437, 9521, 9661, 9689, 9829,
];

const SIGMA_1_MINUS: &[u64] = &[
    13, 41, 97, 349, 433, 461, 601, 769, 797, 853, 1021, 1049, 1217, 1301, 1609, 1637, 1693,
    1721, 1777, 1861, 1889, 1973, 2029, 2113, 2141, 2309, 2477, 2617, 2729, 2953, 2897,
    3121, 3541, 3821, 3989, 4073, 4129, 4157, 4409, 4493, 4549, 4801, 4969, 5081, 5333,
    5417, 5557, 5641, 5669, 6089, 6173, 6229, 6397, 6733, 6761, 7013, 7069, 7321, 7349,
    7433, 7489, 7517, 7573, 7853, 7993, 8161, 8273, 8329, 8861, 9001, 9029, 9281, 9337,
    9421, 9533,
];

const SIGMA_2_PLUS: &[u64] = &[
    43, 71, 127, 211, 463, 631, 659, 743, 827, 883, 911, 967, 1163, 1303, 1471, 1499, 1667,
    1723, 2003, 2087, 2311, 2339, 2423, 2591, 2647, 2731, 2843, 2927, 3011, 3067, 3347,
    3571, 3739, 3767, 3851, 4019, 4243, 4327, 4691, 4831, 4943, 4999, 5167, 5279, 5419,
    5531, 5783, 5839, 6007, 6091, 6203, 6287, 6343, 6679, 6763, 6791, 7127, 7211, 7351,
    7547, 7603, 7687, 7883, 8191, 8219, 8387, 8527, 8779, 8807, 8863, 9059, 9199, 9283,
    9311, 9479, 9619, 9787, 9871,
];

const SIGMA_2_MINUS: &[u64] = &[
    83, 138, 223, 307, 419, 503, 587, 643, 727, 811, 839, 1063, 1091, 1231, 1259, 1427,
    1483, 1567, 1847, 2099, 2239, 2267, 2659, 2687, 2939, 3079, 3163, 3191, 3499, 3527,
    3583, 3779, 3863, 3919, 3947, 4423, 4451, 4507, 4591, 4703, 4787, 5011, 5039, 5347,
    5431, 5711, 5851, 5879, 6047, 6131, 6271, 6299, 6551, 6607, 6691, 6719, 6971, 7027,
    7559, 7643, 7699, 7727, 7867, 7951, 8147, 8231, 8287, 8539, 8819, 9323, 9463, 9547, 9743,
];

const SIGMA_3_PLUS: &[u64] = &[
    701, 1093, 1289, 1373, 2521, 2549, 2689, 3557, 4397, 4481, 4789, 6833, 6917, 7253, 7477,
    7673, 7757, 7481, 8009, 8513, 8737, 8849, 8933, 9857,
];

const SIGMA_3_MINUS: &[u64] = &[
    181, 293, 881, 937, 1553, 2281, 2393, 3037, 3373, 3457, 2709, 3793, 3877, 4241, 4297,
    5501, 6257, 6481, 7237, 7741, 7937, 8581, 8609,
];

pub const APPENDIX_LISTS: [SigmaList; 8] = [
    SigmaList { k: 0, sign: 1, printed_count: 22, primes: SIGMA_0_PLUS },
    SigmaList { k: 0, sign: -1, printed_count: 26, primes: SIGMA_0_MINUS },
    SigmaList { k: 1, sign: 1, printed_count: 79, primes: SIGMA_1_PLUS },
    SigmaList { k: 1, sign: -1, printed_count: 75, primes: SIGMA_1_MINUS },
    SigmaList { k: 2, sign: 1, printed_count: 78, primes: SIGMA_2_PLUS },
    SigmaList { k: 2, sign: -1, printed_count: 73, primes: SIGMA_2_MINUS },
    SigmaList { k: 3, sign: 1, printed_count: 24, primes: SIGMA_3_PLUS },
    SigmaList { k: 3, sign: -1, printed_count: 23, primes: SIGMA_3_MINUS },
];

/// Published aggregate counts for k = 0..3.
pub const PRINTED_TOTALS: [usize; 4] = [48, 154, 151, 47];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Erratum {
    /// A misprinted entry: `printed` is not a prime of the list's residue
    /// class, `corrected` is, and the two differ by one digit or by swapping
    /// two adjacent digits.
    Misprint { k: usize, sign: i8, printed: u64, corrected: u64 },
    /// An entry listed under the wrong residue class.
    WrongClass { k: usize, printed_sign: i8, p: u64 },
}

pub const ERRATA: [Erratum; 4] = [
    Erratum::Misprint { k: 2, sign: -1, printed: 138, corrected: 139 },
    Erratum::Misprint { k: 3, sign: 1, printed: 7481, corrected: 7841 },
    Erratum::Misprint { k: 3, sign: -1, printed: 2709, corrected: 3709 },
    Erratum::WrongClass { k: 1, printed_sign: 1, p: 8693 },
];

fn in_class(p: u64, sign: i8) -> bool {
    numkit::is_prime(p) && p % 7 == if sign > 0 { 1 } else { 6 }
}

fn digit_slip(a: u64, b: u64) -> bool {
    let (x, y) = (a.to_string().into_bytes(), b.to_string().into_bytes());
    if x.len() != y.len() {
        return false;
    }
    let diff: Vec<usize> = (0..x.len()).filter(|&i| x[i] != y[i]).collect();
    match diff.as_slice() {
        [_] => true,
        [i, j] => *j == i + 1 && x[*i] == y[*j] && x[*j] == y[*i],
        _ => false,
    }
}

impl Erratum {
    /// Checks the erratum against the printed data; `Err` explains which
    /// condition failed.
    pub fn justify(&self) -> Result<String, String> {
        match *self {
            Erratum::Misprint { k, sign, printed, corrected } => {
                let list = find(k, sign);
                if !list.primes.contains(&printed) {
                    return Err(format!("{printed} is not printed in {}", list.label()));
                }
                if in_class(printed, sign) {
                    return Err(format!("{printed} is a valid entry"));
                }
                if !in_class(corrected, sign) {
                    return Err(format!("{corrected} is not a prime in the class"));
                }
                if !digit_slip(printed, corrected) {
                    return Err(format!("{printed} and {corrected} are not one slip apart"));
                }
                let why = if !numkit::is_prime(printed) {
                    format!("{printed} is not prime")
                } else {
                    format!("{printed} is {} mod 7", printed % 7)
                };
                Ok(format!("{}: {why}; read {corrected}", list.label()))
            }
            Erratum::WrongClass { k, printed_sign, p } => {
                let list = find(k, printed_sign);
                if !list.primes.contains(&p) {
                    return Err(format!("{p} is not printed in {}", list.label()));
                }
                if in_class(p, printed_sign) || !in_class(p, -printed_sign) {
                    return Err(format!("{p} is in the printed class"));
                }
                Ok(format!("{}: {p} is {} mod 7, so it belongs to the other class", list.label(), p % 7))
            }
        }
    }
}

fn find(k: usize, sign: i8) -> &'static SigmaList {
    APPENDIX_LISTS.iter().find(|l| l.k == k && l.sign == sign).expect("list exists")
}

/// The lists with the errata applied, ascending, keyed like
/// [`crate::density::SweepResult::sigma_lists`].
pub fn corrected_lists() -> BTreeMap<(usize, String), Vec<u64>> {
    let mut out: BTreeMap<(usize, String), Vec<u64>> =
        APPENDIX_LISTS.iter().map(|l| (l.key(), l.primes.to_vec())).collect();
    let key = |k: usize, sign: i8| (k, if sign > 0 { "+1".to_string() } else { "-1".to_string() });
    for e in ERRATA {
        match e {
            Erratum::Misprint { k, sign, printed, corrected } => {
                for p in out.get_mut(&key(k, sign)).unwrap().iter_mut() {
                    if *p == printed {
                        *p = corrected;
                    }
                }
            }
            Erratum::WrongClass { k, printed_sign, p } => {
                out.get_mut(&key(k, printed_sign)).unwrap().retain(|&x| x != p);
                out.get_mut(&key(k, -printed_sign)).unwrap().push(p);
            }
        }
    }
    for v in out.values_mut() {
        v.sort_unstable();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_counts_match_list_lengths() {
        for l in APPENDIX_LISTS {
            assert_eq!(l.primes.len(), l.printed_count, "{}", l.label());
        }
        for k in 0..4 {
            let total: usize =
                APPENDIX_LISTS.iter().filter(|l| l.k == k).map(|l| l.printed_count).sum();
            assert_eq!(total, PRINTED_TOTALS[k]);
        }
    }

    #[test]
    fn every_erratum_is_justified() {
        for e in ERRATA {
            assert!(e.justify().is_ok(), "{e:?}: {:?}", e.justify());
        }
    }

    #[test]
    fn unjustified_errata_are_rejected() {
        let bogus = Erratum::Misprint { k: 0, sign: 1, printed: 239, corrected: 233 };
        assert!(bogus.justify().is_err());
        let bogus = Erratum::WrongClass { k: 0, printed_sign: 1, p: 239 };
        assert!(bogus.justify().is_err());
    }

    #[test]
    fn corrected_lists_cover_first_400_primes() {
        let all: Vec<u64> = {
            let mut v: Vec<u64> = corrected_lists().into_values().flatten().collect();
            v.sort_unstable();
            v
        };
        let expect: Vec<u64> = numkit::Primes::new().filter(|p| p % 7 == 1 || p % 7 == 6).take(400).collect();
        assert_eq!(all, expect);
        for ((_, sign), v) in corrected_lists() {
            let r = if sign == "+1" { 1 } else { 6 };
            assert!(v.iter().all(|p| p % 7 == r));
        }
    }
}
