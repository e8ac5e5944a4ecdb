use std::fmt;

/// Physical dimension of a scalar rule value.
///
/// `Pixel` is the `p` unit suffix: a pixel-domain annotation that unifies
/// with both counts and intensity levels. Bare literals are dimensionless
/// and unify with everything; `Ratio` otherwise only unifies with itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Count,
    Level,
    Ratio,
    Pixel,
    Dimensionless,
}

impl Dimension {
    pub fn unifies_with(self, other: Dimension) -> bool {
        use Dimension::*;
        match (self, other) {
            (a, b) if a == b => true,
            (Dimensionless, _) | (_, Dimensionless) => true,
            (Pixel, Count) | (Count, Pixel) => true,
            (Pixel, Level) | (Level, Pixel) => true,
            _ => false,
        }
    }

    /// Resulting dimension of adding or subtracting two unifiable scalars:
    /// the more specific of the two.
    pub fn join(self, other: Dimension) -> Dimension {
        use Dimension::*;
        match (self, other) {
            (a, b) if a == b => a,
            (Dimensionless, d) | (d, Dimensionless) => d,
            (Pixel, d) | (d, Pixel) => d,
            _ => unreachable!("join requires unifiable dimensions"),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Count => "count",
            Dimension::Level => "level",
            Dimension::Ratio => "ratio",
            Dimension::Pixel => "pixel",
            Dimension::Dimensionless => "dimensionless",
        }
    }
}

/// Static type of a rule expression.
///
/// `DisparityImage` covers taps of disparity-typed ports; no builtin
/// consumes it, but the tap itself must still type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemanticType {
    RawImage,
    MonoImage,
    DisparityImage,
    Histogram,
    Series(Dimension),
    PointCloud,
    Region,
    Scalar(Dimension),
    Boolean,
}

impl fmt::Display for SemanticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticType::RawImage => write!(f, "RawImage"),
            SemanticType::MonoImage => write!(f, "MonoImage"),
            SemanticType::DisparityImage => write!(f, "DisparityImage"),
            SemanticType::Histogram => write!(f, "Histogram"),
            SemanticType::Series(d) => write!(f, "Series({})", d.as_str()),
            SemanticType::PointCloud => write!(f, "PointCloud"),
            SemanticType::Region => write!(f, "Region"),
            SemanticType::Scalar(d) => write!(f, "Scalar({})", d.as_str()),
            SemanticType::Boolean => write!(f, "Boolean"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Dimension::*;

    #[test]
    fn pixel_bridges_count_and_level() {
        assert!(Pixel.unifies_with(Count));
        assert!(Pixel.unifies_with(Level));
        assert!(Count.unifies_with(Pixel));
        assert!(!Count.unifies_with(Level));
    }

    #[test]
    fn ratio_only_accepts_ratio_or_dimensionless() {
        assert!(Ratio.unifies_with(Ratio));
        assert!(Ratio.unifies_with(Dimensionless));
        assert!(!Ratio.unifies_with(Count));
        assert!(!Ratio.unifies_with(Pixel));
        assert!(!Ratio.unifies_with(Level));
    }

    #[test]
    fn join_prefers_the_specific_dimension() {
        assert_eq!(Level.join(Pixel), Level);
        assert_eq!(Pixel.join(Count), Count);
        assert_eq!(Dimensionless.join(Ratio), Ratio);
        assert_eq!(Pixel.join(Pixel), Pixel);
    }
}
