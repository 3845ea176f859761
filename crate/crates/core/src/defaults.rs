//! Per-length search defaults for the LTE interleaver lengths 40..=1504:
//! the SNR at which bounds are evaluated, the number of spectrum terms, and
//! the standard LTE polynomial used as the comparison baseline.

use crate::qpp::Qpp;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LengthDefaults {
    pub length: usize,
    pub snr_db: f64,
    pub num_dist: usize,
    pub lte_q1: usize,
    pub lte_q2: usize,
}

impl LengthDefaults {
    const fn new(length: usize, snr_db: f64, num_dist: usize, lte_q1: usize, lte_q2: usize) -> Self {
        Self {
            length,
            snr_db,
            num_dist,
            lte_q1,
            lte_q2,
        }
    }

    pub fn lte(&self) -> Qpp {
        Qpp::new(self.length, self.lte_q1, self.lte_q2)
    }
}

/// Every LTE block length up to 1504, ascending.
pub const TABLE: &[LengthDefaults] = &[
    LengthDefaults::new(40, 7.5, 9, 3, 10),
    LengthDefaults::new(48, 7.5, 9, 7, 12),
    LengthDefaults::new(56, 7.5, 9, 19, 42),
    LengthDefaults::new(64, 7.5, 9, 7, 16),
    LengthDefaults::new(72, 7.5, 9, 7, 18),
    LengthDefaults::new(80, 6.5, 9, 11, 20),
    LengthDefaults::new(88, 6.5, 9, 5, 22),
    LengthDefaults::new(96, 6.5, 9, 11, 24),
    LengthDefaults::new(104, 6.0, 9, 7, 26),
    LengthDefaults::new(112, 6.0, 9, 41, 84),
    LengthDefaults::new(120, 6.0, 7, 103, 90),
    LengthDefaults::new(128, 5.5, 7, 15, 32),
    LengthDefaults::new(136, 5.5, 7, 9, 34),
    LengthDefaults::new(144, 5.0, 7, 17, 108),
    LengthDefaults::new(152, 5.0, 7, 9, 38),
    LengthDefaults::new(160, 5.0, 7, 21, 120),
    LengthDefaults::new(168, 5.0, 7, 101, 84),
    LengthDefaults::new(176, 5.0, 7, 21, 44),
    LengthDefaults::new(184, 5.0, 7, 57, 46),
    LengthDefaults::new(192, 4.5, 7, 23, 48),
    LengthDefaults::new(200, 4.5, 7, 13, 50),
    LengthDefaults::new(208, 4.5, 7, 27, 52),
    LengthDefaults::new(216, 4.5, 7, 11, 36),
    LengthDefaults::new(224, 4.5, 7, 27, 56),
    LengthDefaults::new(232, 4.5, 7, 85, 58),
    LengthDefaults::new(240, 4.5, 7, 29, 60),
    LengthDefaults::new(248, 4.5, 7, 33, 62),
    LengthDefaults::new(256, 4.5, 7, 15, 32),
    LengthDefaults::new(264, 4.0, 7, 17, 198),
    LengthDefaults::new(272, 4.0, 7, 33, 68),
    LengthDefaults::new(280, 4.0, 7, 103, 210),
    LengthDefaults::new(288, 4.0, 7, 19, 36),
    LengthDefaults::new(296, 4.0, 5, 19, 74),
    LengthDefaults::new(304, 4.0, 5, 37, 76),
    LengthDefaults::new(312, 4.0, 5, 19, 78),
    LengthDefaults::new(320, 4.0, 5, 21, 120),
    LengthDefaults::new(328, 4.0, 5, 21, 82),
    LengthDefaults::new(336, 3.5, 5, 115, 84),
    LengthDefaults::new(344, 3.5, 5, 193, 86),
    LengthDefaults::new(352, 3.5, 5, 21, 44),
    LengthDefaults::new(360, 3.5, 5, 133, 90),
    LengthDefaults::new(368, 3.5, 5, 81, 46),
    LengthDefaults::new(376, 3.5, 5, 45, 94),
    LengthDefaults::new(384, 3.0, 5, 23, 48),
    LengthDefaults::new(392, 3.0, 5, 243, 98),
    LengthDefaults::new(400, 3.0, 5, 151, 40),
    LengthDefaults::new(408, 3.0, 5, 155, 102),
    LengthDefaults::new(416, 3.0, 5, 25, 52),
    LengthDefaults::new(424, 3.0, 5, 51, 106),
    LengthDefaults::new(432, 3.0, 5, 47, 72),
    LengthDefaults::new(440, 3.0, 5, 91, 110),
    LengthDefaults::new(448, 3.0, 3, 29, 168),
    LengthDefaults::new(456, 3.0, 3, 29, 114),
    LengthDefaults::new(464, 3.0, 3, 247, 58),
    LengthDefaults::new(472, 3.0, 3, 29, 118),
    LengthDefaults::new(480, 3.0, 3, 89, 180),
    LengthDefaults::new(488, 3.0, 3, 91, 122),
    LengthDefaults::new(496, 3.0, 3, 157, 62),
    LengthDefaults::new(504, 3.0, 3, 55, 84),
    LengthDefaults::new(512, 3.0, 3, 31, 64),
    LengthDefaults::new(528, 3.0, 3, 17, 66),
    LengthDefaults::new(544, 3.0, 3, 35, 68),
    LengthDefaults::new(560, 3.0, 3, 227, 420),
    LengthDefaults::new(576, 3.0, 3, 65, 96),
    LengthDefaults::new(592, 3.0, 3, 19, 74),
    LengthDefaults::new(608, 2.75, 3, 37, 76),
    LengthDefaults::new(624, 2.75, 3, 41, 234),
    LengthDefaults::new(640, 2.75, 3, 39, 80),
    LengthDefaults::new(656, 2.75, 3, 185, 82),
    LengthDefaults::new(672, 2.75, 3, 43, 252),
    LengthDefaults::new(688, 2.75, 3, 21, 86),
    LengthDefaults::new(704, 2.75, 3, 155, 44),
    LengthDefaults::new(720, 2.75, 3, 79, 120),
    LengthDefaults::new(736, 2.75, 3, 139, 92),
    LengthDefaults::new(752, 2.75, 3, 23, 94),
    LengthDefaults::new(768, 2.75, 3, 217, 48),
    LengthDefaults::new(784, 2.75, 3, 25, 98),
    LengthDefaults::new(800, 2.75, 3, 17, 80),
    LengthDefaults::new(816, 2.75, 3, 127, 102),
    LengthDefaults::new(832, 2.75, 1, 25, 52),
    LengthDefaults::new(848, 2.75, 1, 239, 106),
    LengthDefaults::new(864, 2.75, 1, 17, 48),
    LengthDefaults::new(880, 2.75, 1, 137, 110),
    LengthDefaults::new(896, 2.75, 1, 215, 112),
    LengthDefaults::new(912, 2.75, 1, 29, 114),
    LengthDefaults::new(928, 2.75, 1, 15, 58),
    LengthDefaults::new(944, 2.75, 1, 147, 118),
    LengthDefaults::new(960, 2.5, 1, 29, 60),
    LengthDefaults::new(976, 2.5, 1, 59, 122),
    LengthDefaults::new(992, 2.25, 1, 65, 124),
    LengthDefaults::new(1008, 2.0, 1, 55, 84),
    LengthDefaults::new(1024, 2.0, 1, 31, 64),
    LengthDefaults::new(1056, 2.0, 1, 17, 66),
    LengthDefaults::new(1088, 2.0, 1, 171, 204),
    LengthDefaults::new(1120, 2.0, 1, 67, 140),
    LengthDefaults::new(1152, 2.0, 1, 35, 72),
    LengthDefaults::new(1184, 2.0, 1, 19, 74),
    LengthDefaults::new(1216, 2.0, 1, 39, 76),
    LengthDefaults::new(1248, 2.0, 1, 19, 78),
    LengthDefaults::new(1280, 2.0, 1, 199, 240),
    LengthDefaults::new(1312, 2.0, 1, 21, 82),
    LengthDefaults::new(1344, 2.0, 1, 211, 252),
    LengthDefaults::new(1376, 2.0, 1, 21, 86),
    LengthDefaults::new(1408, 2.0, 1, 43, 88),
    LengthDefaults::new(1440, 2.0, 1, 149, 60),
    LengthDefaults::new(1472, 2.0, 1, 45, 92),
    LengthDefaults::new(1504, 2.0, 1, 49, 846),
];

pub fn defaults_for(length: usize) -> Result<&'static LengthDefaults> {
    TABLE
        .binary_search_by_key(&length, |row| row.length)
        .map(|i| &TABLE[i])
        .map_err(|_| Error::NoDefaults(length))
}

pub fn lengths() -> impl Iterator<Item = usize> {
    TABLE.iter().map(|row| row.length)
}
