/// Outcome of one numerical identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Worst defect over everything the check quantifies over.
    pub defect: f64,
    pub threshold: f64,
    /// Element indices where the worst defect occurred, when meaningful.
    pub at: Option<(usize, usize)>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &'static str, defect: f64, threshold: f64) -> Self {
        Self { name, defect, threshold, at: None, pass: defect <= threshold }
    }

    pub fn at(mut self, pair: (usize, usize)) -> Self {
        self.at = Some(pair);
        self
    }
}

/// Running maximum that remembers where it was attained.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Worst {
    pub value: f64,
    pub at: Option<(usize, usize)>,
}

impl Worst {
    pub fn update(&mut self, value: f64, at: (usize, usize)) {
        // NaN always wins so that broken data is never reported as clean
        let stuck = self.value.is_nan() && self.at.is_some();
        if !stuck && (value.is_nan() || value > self.value || self.at.is_none()) {
            self.value = value;
            self.at = Some(at);
        }
    }

    pub fn check(self, name: &'static str, threshold: f64) -> Check {
        let mut c = Check::new(name, self.value, threshold);
        c.at = self.at;
        if self.value.is_nan() {
            c.pass = false;
        }
        c
    }
}
