use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::expr::Env;
use crate::minimizer::{minimize_section, section_level_set, MinResult};
use crate::numeric::{ExtendedReal, Real};
use crate::problem::Parametric;
use crate::sets::IntervalSet;

use super::{CheckError, CheckPlan, SetSubject, Subject, Truncation};

/// A problem together with a plan and caches of feasible sets and
/// minimization results.
pub struct Ctx<'a, P: Parametric + ?Sized> {
    pub p: &'a P,
    pub plan: &'a CheckPlan,
    values: Mutex<HashMap<String, MinResult>>,
    phis: Mutex<HashMap<String, IntervalSet>>,
    evaluations: AtomicU64,
}

impl<'a, P: Parametric + ?Sized> Ctx<'a, P> {
    pub fn new(p: &'a P, plan: &'a CheckPlan) -> Self {
        Ctx {
            p,
            plan,
            values: Mutex::new(HashMap::new()),
            phis: Mutex::new(HashMap::new()),
            evaluations: AtomicU64::new(0),
        }
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    fn count(&self, n: u64) {
        self.evaluations.fetch_add(n, Ordering::Relaxed);
    }

    pub fn window(&self) -> &IntervalSet {
        self.p.x_domain()
    }

    pub fn tagged(&self) -> bool {
        self.p.mentions_rationality()
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.p
            .truncation()
            .map(|(lambda, anchor)| Truncation { lambda, anchor })
    }

    /// `v(x)` and `Φ*(x)`, computed once per point.
    pub fn value(&self, x: &Real) -> Result<MinResult, CheckError> {
        let key = x.to_string();
        if let Some(r) = self.values.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let sec = self.p.section(x)?;
        let r = minimize_section(&sec, &self.plan.min)?;
        self.count(r.evaluations);
        self.values.lock().unwrap().insert(key, r.clone());
        Ok(r)
    }

    pub fn phi(&self, x: &Real) -> Result<IntervalSet, CheckError> {
        let key = x.to_string();
        if let Some(s) = self.phis.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let s = self.p.section(x)?.feasible;
        self.phis.lock().unwrap().insert(key, s.clone());
        Ok(s)
    }

    pub fn set(&self, s: &SetSubject, x: &Real) -> Result<IntervalSet, CheckError> {
        match s {
            SetSubject::Phi => self.phi(x),
            SetSubject::ArgMin => Ok(self.value(x)?.argmin),
            SetSubject::Level { lambda } => {
                let sec = self.p.section(x)?;
                let out = section_level_set(&sec, &ExtendedReal::Finite(lambda.clone()), &self.plan.min, &[])?;
                self.count(sec.evaluations());
                Ok(out)
            }
        }
    }

    pub fn cost(&self, x: &Real, y: &Real) -> Result<ExtendedReal, CheckError> {
        self.count(1);
        Ok(self.p.cost_at(x, y)?)
    }

    pub fn scalar(&self, s: &Subject, x: &Real, y: Option<&Real>) -> Result<ExtendedReal, CheckError> {
        match s {
            Subject::Cost { .. } => {
                let y = y.ok_or_else(|| CheckError::Precondition("cost needs a y coordinate".into()))?;
                self.cost(x, y)
            }
            Subject::Value => Ok(self.value(x)?.value),
            Subject::Scalar { f } => {
                self.count(1);
                f.eval(&Env::new(x, x)).map_err(|e| CheckError::Precondition(format!("f({x}): {e}")))
            }
        }
    }
}
