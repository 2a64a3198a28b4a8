//! Built-in models, embedded at compile time.

use std::path::Path;

use crate::error::ModelError;
use crate::model::{load_model, parse_model, Model};

const FIXTURES: &[(&str, &str)] = &[
    ("example1", include_str!("../models/example1.model")),
    ("example1-r7", include_str!("../models/example1-r7.model")),
    ("example1-printed-metric", include_str!("../models/example1-printed-metric.model")),
    ("example2", include_str!("../models/example2.model")),
    ("example3", include_str!("../models/example3.model")),
    ("example4", include_str!("../models/example4.model")),
    ("flat-r2-r1", include_str!("../models/flat-r2-r1.model")),
    ("control-r3-r2", include_str!("../models/control-r3-r2.model")),
];

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

pub fn fixture_source(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn fixture(name: &str) -> Result<Model, ModelError> {
    let text = fixture_source(name).ok_or_else(|| ModelError::UnknownFixture(name.to_string()))?;
    parse_model(text)
}

/// A fixture name, or else a path to a model file.
pub fn resolve(name_or_path: &str) -> Result<Model, ModelError> {
    if fixture_source(name_or_path).is_some() {
        return fixture(name_or_path);
    }
    if Path::new(name_or_path).exists() {
        return load_model(name_or_path);
    }
    Err(ModelError::UnknownFixture(name_or_path.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_parses_with_its_own_name() {
        for name in fixture_names() {
            let m = fixture(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(m.name, name);
        }
    }

    #[test]
    fn dimensions() {
        let dims = |n: &str| {
            let m = fixture(n).unwrap();
            (m.dim(), m.submersion.as_ref().map(|s| s.target_dim()))
        };
        assert_eq!(dims("example1"), (5, None));
        assert_eq!(dims("example1-r7"), (7, None));
        assert_eq!(dims("example2"), (5, Some(2)));
        assert_eq!(dims("example3"), (5, Some(3)));
        assert_eq!(dims("example4"), (7, Some(5)));
        assert!(!fixture("example4").unwrap().submersion.unwrap().target_guards.is_empty());
    }
}
