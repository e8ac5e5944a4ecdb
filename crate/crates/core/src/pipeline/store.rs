use crate::vision::{histogram, DisparityImage, Histogram, MonoImage, PointCloud, RawImage};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// A typed value held at an output port for one frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Raw(Arc<RawImage>),
    Mono(Arc<MonoImage>),
    Disparity(Arc<DisparityImage>),
    Cloud(Arc<PointCloud>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Raw(_) => "RawImage",
            Value::Mono(_) => "MonoImage",
            Value::Disparity(_) => "DisparityImage",
            Value::Cloud(_) => "PointCloud",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("no value at {component}.{port} for this frame")]
    MissingValue { component: String, port: String },
    #[error("{component}.{port} already written this frame")]
    DuplicateWrite { component: String, port: String },
    #[error("frame store is sealed")]
    Sealed,
    #[error("{component}.{port} holds {found}, expected {expected}")]
    WrongType {
        component: String,
        port: String,
        expected: &'static str,
        found: &'static str,
    },
}

/// Per-frame typed values at every output port, plus a cache for derived
/// histograms.
///
/// Single writer (the pipeline executor) until sealed; any number of
/// readers afterwards. Derived histograms are computed on first access and
/// cached for the frame; the computation counter exists so tests can
/// observe the caching.
#[derive(Debug)]
pub struct FrameStore {
    frame_id: u64,
    values: BTreeMap<(String, String), Value>,
    sealed: bool,
    hist_cache: Mutex<BTreeMap<(String, String), Arc<Histogram>>>,
    hist_computations: AtomicU64,
}

impl FrameStore {
    pub fn new(frame_id: u64) -> Self {
        FrameStore {
            frame_id,
            values: BTreeMap::new(),
            sealed: false,
            hist_cache: Mutex::new(BTreeMap::new()),
            hist_computations: AtomicU64::new(0),
        }
    }

    pub fn frame_id(&self) -> u64 {
        self.frame_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    /// Write a port value. Executor-only; each port is written at most once
    /// per frame and never after sealing.
    pub fn insert(
        &mut self,
        component: impl Into<String>,
        port: impl Into<String>,
        value: Value,
    ) -> Result<(), StoreError> {
        if self.sealed {
            return Err(StoreError::Sealed);
        }
        let key = (component.into(), port.into());
        if self.values.contains_key(&key) {
            return Err(StoreError::DuplicateWrite {
                component: key.0,
                port: key.1,
            });
        }
        self.values.insert(key, value);
        Ok(())
    }

    pub fn seal(&mut self) {
        self.sealed = true;
    }

    /// Read the value stored at an output port this frame.
    pub fn tap(&self, component: &str, port: &str) -> Result<&Value, StoreError> {
        self.values
            .get(&(component.to_string(), port.to_string()))
            .ok_or_else(|| StoreError::MissingValue {
                component: component.to_string(),
                port: port.to_string(),
            })
    }

    /// Histogram of the mono image at a port, computed once per frame.
    pub fn histogram_of(&self, component: &str, port: &str) -> Result<Arc<Histogram>, StoreError> {
        let key = (component.to_string(), port.to_string());
        let mut cache = self.hist_cache.lock().expect("histogram cache poisoned");
        if let Some(hit) = cache.get(&key) {
            return Ok(Arc::clone(hit));
        }
        let value = self.tap(component, port)?;
        let Value::Mono(img) = value else {
            return Err(StoreError::WrongType {
                component: key.0,
                port: key.1,
                expected: "MonoImage",
                found: value.type_name(),
            });
        };
        self.hist_computations.fetch_add(1, Ordering::Relaxed);
        let hist = Arc::new(histogram(img));
        cache.insert(key, Arc::clone(&hist));
        Ok(hist)
    }

    /// How many histograms have actually been computed (not served from
    /// cache) on this store.
    pub fn histogram_computations(&self) -> u64 {
        self.hist_computations.load(Ordering::Relaxed)
    }
}

impl PartialEq for FrameStore {
    /// Equality over frame id and stored values; the derived cache is
    /// a pure function of those and takes no part.
    fn eq(&self, other: &Self) -> bool {
        self.frame_id == other.frame_id && self.values == other.values
    }
}
