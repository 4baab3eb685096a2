//! Public datasets bundled with the harness.

use dcc_core::{Dataset, Error, Result};

pub const EARTHQUAKE_FIRST_YEAR: u32 = 1980;

/// Yearly worldwide counts of earthquakes at or above magnitude 8, 7, 6
/// and 5, 1980 to 2017.
const EARTHQUAKE_M8: [u32; 38] = [
    0, 0, 0, 0, 0, 2, 1, 0, 0, 1, 0, 0, 0, 0, 2, 2, 1, 0, 1, 0, 1, 1, 0, 1, 2, 1, 2, 4, 0, 1, 1, 1, 2, 2, 1, 1, 0, 1,
];
const EARTHQUAKE_M7: [u32; 38] = [
    6, 10, 7, 14, 14, 15, 11, 13, 11, 8, 18, 17, 13, 12, 13, 20, 15, 16, 12, 18, 15, 16, 13, 15, 16, 11, 11, 18, 12,
    17, 24, 20, 16, 19, 12, 19, 16, 7,
];
const EARTHQUAKE_M6: [u32; 38] = [
    96, 88, 90, 139, 141, 162, 140, 173, 126, 139, 154, 137, 179, 148, 159, 201, 164, 136, 121, 136, 160, 137, 139,
    156, 157, 151, 153, 196, 179, 161, 175, 207, 133, 142, 155, 146, 146, 111,
];
const EARTHQUAKE_M5: [u32; 38] = [
    1408, 1265, 1505, 1802, 1683, 1806, 1765, 1572, 1598, 1561, 1765, 1583, 1675, 1564, 1693, 1501, 1373, 1234, 1074,
    1192, 1495, 1352, 1309, 1364, 1672, 1843, 1877, 2283, 1965, 2075, 2395, 2692, 1680, 1596, 1729, 1558, 1696, 1560,
];

/// Survey times (fractional years) and the two transect counts of red
/// kangaroos.
const KANGAROO_TIMES: [f64; 41] = [
    1973.497, 1973.75, 1974.163, 1974.413, 1974.665, 1975.002, 1975.245, 1975.497, 1975.75, 1976.078, 1976.33,
    1976.582, 1976.917, 1977.245, 1977.497, 1977.665, 1978.002, 1978.33, 1978.582, 1978.832, 1979.078, 1979.582,
    1979.832, 1980.163, 1980.497, 1980.75, 1980.917, 1981.163, 1981.497, 1981.665, 1981.917, 1982.163, 1982.413,
    1982.665, 1982.917, 1983.163, 1983.413, 1983.665, 1983.917, 1984.163, 1984.413,
];
const KANGAROO_Y1: [u32; 41] = [
    267, 333, 159, 145, 340, 463, 305, 329, 575, 227, 532, 769, 526, 565, 466, 494, 440, 858, 599, 298, 529, 912, 703,
    402, 669, 796, 483, 700, 418, 979, 757, 755, 517, 710, 240, 490, 497, 250, 271, 303, 386,
];
const KANGAROO_Y2: [u32; 41] = [
    326, 144, 145, 138, 413, 531, 331, 329, 529, 318, 449, 852, 332, 742, 479, 620, 531, 751, 442, 824, 660, 834, 955,
    453, 953, 808, 975, 627, 851, 721, 1112, 731, 748, 675, 272, 292, 389, 323, 272, 248, 290,
];

pub const DATASET_NAMES: [&str; 5] = [
    "earthquake-m8",
    "earthquake-m7",
    "earthquake-m6",
    "earthquake-m5",
    "kangaroo",
];

fn counts(c: &[u32]) -> Result<Dataset> {
    let years = (0..c.len())
        .map(|i| (EARTHQUAKE_FIRST_YEAR as usize + i) as f64)
        .collect();
    Dataset::new(c.iter().map(|&v| vec![f64::from(v)]).collect(), Some(years))
}

pub fn embedded_dataset(name: &str) -> Result<Dataset> {
    match name {
        "earthquake-m8" => counts(&EARTHQUAKE_M8),
        "earthquake-m7" => counts(&EARTHQUAKE_M7),
        "earthquake-m6" => counts(&EARTHQUAKE_M6),
        "earthquake-m5" => counts(&EARTHQUAKE_M5),
        "kangaroo" => Dataset::new(
            KANGAROO_Y1
                .iter()
                .zip(&KANGAROO_Y2)
                .map(|(&a, &b)| vec![f64::from(a), f64::from(b)])
                .collect(),
            Some(KANGAROO_TIMES.to_vec()),
        ),
        other => Err(Error::UnknownDataset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_names_load() {
        for name in DATASET_NAMES {
            embedded_dataset(name).unwrap();
        }
        assert!(matches!(embedded_dataset("m9"), Err(Error::UnknownDataset(_))));
    }

    #[test]
    fn embedded_datasets_have_expected_shape() {
        let m8 = embedded_dataset("earthquake-m8").unwrap();
        assert_eq!(m8.values().iter().sum::<f64>(), 32.0);
        let k = embedded_dataset("kangaroo").unwrap();
        assert_eq!(k.n(), 41);
        assert_eq!(k.dim(), 2);
        let t = k.timestamps().unwrap();
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        for m in ["earthquake-m7", "earthquake-m6", "earthquake-m5"] {
            assert_eq!(embedded_dataset(m).unwrap().n(), m8.n());
        }
    }
}
