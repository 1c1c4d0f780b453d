//! Thread-local FFT plan cache shared by the signal generator and the
//! cyclic-spectrum estimators.

use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Direction {
    Forward,
    Inverse,
}

type PlanCache = HashMap<(TypeId, usize, Direction), Box<dyn Any>>;

thread_local! {
    // Keyed by scalar type, transform length and direction. Plans are cheap
    // to clone (Arc) but not to build, and the Monte Carlo loops reuse the
    // same handful of lengths millions of times.
    static PLANS: RefCell<PlanCache> = RefCell::new(HashMap::new());
}

fn plan<T: Scalar>(len: usize, dir: Direction) -> Arc<dyn Fft<T>> {
    PLANS.with(|cache| {
        let mut cache = cache.borrow_mut();
        let entry = cache
            .entry((TypeId::of::<T>(), len, dir))
            .or_insert_with(|| {
                let mut planner = FftPlanner::<T>::new();
                let plan = match dir {
                    Direction::Forward => planner.plan_fft_forward(len),
                    Direction::Inverse => planner.plan_fft_inverse(len),
                };
                Box::new(plan) as Box<dyn Any>
            });
        entry
            .downcast_ref::<Arc<dyn Fft<T>>>()
            .expect("plan cache holds Arc<dyn Fft<T>>")
            .clone()
    })
}

/// In-place unnormalized forward DFT: `X[k] = Σ_t x[t] e^{-j2πkt/N}`.
pub(crate) fn forward<T: Scalar>(buf: &mut [Complex<T>]) {
    if buf.len() > 1 {
        plan::<T>(buf.len(), Direction::Forward).process(buf);
    }
}

/// In-place unnormalized inverse DFT: `x[t] = Σ_k X[k] e^{+j2πkt/N}`.
pub(crate) fn inverse<T: Scalar>(buf: &mut [Complex<T>]) {
    if buf.len() > 1 {
        plan::<T>(buf.len(), Direction::Inverse).process(buf);
    }
}
