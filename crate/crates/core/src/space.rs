//! Destination color spaces.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Lab,
    Hsi,
    Sct,
}

impl Space {
    pub const ALL: [Space; 3] = [Space::Lab, Space::Hsi, Space::Sct];

    pub fn code(self) -> u32 {
        match self {
            Space::Lab => 0,
            Space::Hsi => 1,
            Space::Sct => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Space> {
        Space::ALL.into_iter().find(|s| s.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Space::Lab => "cielab",
            Space::Hsi => "hsi",
            Space::Sct => "sct",
        }
    }

    pub fn from_name(name: &str) -> Option<Space> {
        match name.to_ascii_lowercase().as_str() {
            "cielab" | "lab" => Some(Space::Lab),
            "hsi" => Some(Space::Hsi),
            "sct" => Some(Space::Sct),
            _ => None,
        }
    }

    /// Which destination components are angles.
    pub fn angular_mask(self) -> [bool; 3] {
        match self {
            Space::Lab => [false; 3],
            Space::Hsi => [true, false, false],
            Space::Sct => [false, true, true],
        }
    }

    /// Bit `k` set when component `k` is angular.
    pub fn mask_bits(self) -> u32 {
        self.angular_mask().iter().enumerate().fold(0, |acc, (k, &a)| acc | (a as u32) << k)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
