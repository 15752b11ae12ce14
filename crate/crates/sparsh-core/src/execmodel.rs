//! Byte-level model of two hybrid host/device placements of a V-cycle.
//!
//! * **CI** (compute intensive) streams the hierarchy through the device one
//!   level at a time: while level `i` is smoothed, `P_i` and `A_{i+1}` are
//!   copied in, and `A_i`, `P_i` leave once the residual is restricted. The
//!   coarsest system is solved on the host. Device memory stays small at the
//!   price of moving every matrix every cycle.
//! * **MI** (memory intensive) keeps `A_i` and `P_i` of every level except
//!   the coarsest resident from setup on; a cycle only ships the coarse
//!   right-hand side down to the host and the coarse solution back.
//!
//! Sizes follow a [`BytesModel`]: a CSR matrix costs
//! `nnz·(value_bytes + index_bytes) + (nrows + 1)·index_bytes`, a vector
//! `n·value_bytes`. CI counts `u_i`, `f_i`, `r_i` of the active level and
//! `f_{i+1}` as its vector working set; MI allocates `u_i`, `f_i`, `r_i` for
//! every device level plus a coarse right-hand-side buffer, and holds the
//! coarse solution only until it has been prolongated.
//! Restricted right-hand sides are evicted as soon as they reach the host.
//! Stream overlap appears only as event order; no timing is modelled.

use alloc::vec::Vec;

use crate::csr::CsrMatrix;
use crate::cycle::CycleParams;
use crate::hierarchy::Hierarchy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BytesModel {
    pub value_bytes: usize,
    pub index_bytes: usize,
}

impl Default for BytesModel {
    fn default() -> Self {
        Self {
            value_bytes: 8,
            index_bytes: 4,
        }
    }
}

impl BytesModel {
    pub fn csr_bytes(&self, a: &CsrMatrix) -> usize {
        a.nnz() * (self.value_bytes + self.index_bytes) + (a.nrows() + 1) * self.index_bytes
    }

    pub fn vector_bytes(&self, n: usize) -> usize {
        n * self.value_bytes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Ci,
    Mi,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Ci => "CI",
            Scheme::Mi => "MI",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    TransferToDevice,
    TransferToHost,
    ComputeDevice,
    ComputeHost,
    /// Device buffer created in place (no transfer).
    AllocateDevice,
    /// Device buffer released.
    Evict,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::TransferToDevice => "transfer_to_device",
            EventKind::TransferToHost => "transfer_to_host",
            EventKind::ComputeDevice => "compute_device",
            EventKind::ComputeHost => "compute_host",
            EventKind::AllocateDevice => "allocate_device",
            EventKind::Evict => "evict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub kind: EventKind,
    /// Data object (`A`, `P`, `u`, `f`, `r`) or operation name.
    pub object: &'static str,
    /// Bytes moved, allocated or released; 0 for compute events.
    pub bytes: usize,
    pub level: usize,
    /// Repetitions of a compute step (smoothing sweeps), 1 otherwise.
    pub repeat: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryPlan {
    pub scheme: Scheme,
    /// Device residency established once at setup (MI only).
    pub setup_events: Vec<Event>,
    /// One V-cycle.
    pub events: Vec<Event>,
    /// High-water mark of device bytes over setup and one cycle.
    pub peak_device_bytes: usize,
    /// Matrix share of the device footprint at its matrix high-water mark.
    pub peak_device_matrix_bytes: usize,
    /// Bytes left resident on the device by setup.
    pub resident_setup_bytes: usize,
    /// Bytes moved in either direction during one cycle.
    pub per_cycle_transfer_bytes: usize,
}

impl MemoryPlan {
    /// Replays setup and cycle events and checks residency bookkeeping:
    /// every eviction releases a resident buffer and nothing is loaded twice.
    /// Returns the device bytes still resident at the end.
    pub fn replay(&self) -> Result<usize, &'static str> {
        let mut dev = Residency::default();
        for e in self.setup_events.iter().chain(&self.events) {
            dev.apply(e)?;
        }
        Ok(dev.total)
    }
}

#[derive(Default)]
struct Residency {
    items: Vec<(&'static str, usize, usize)>,
    total: usize,
    matrices: usize,
    peak: usize,
    peak_matrices: usize,
}

fn is_matrix(object: &str) -> bool {
    object == "A" || object == "P"
}

impl Residency {
    fn apply(&mut self, e: &Event) -> Result<(), &'static str> {
        match e.kind {
            EventKind::TransferToDevice | EventKind::AllocateDevice => {
                if self.items.iter().any(|&(o, l, _)| o == e.object && l == e.level) {
                    return Err("object loaded while already resident");
                }
                self.items.push((e.object, e.level, e.bytes));
                self.total += e.bytes;
                if is_matrix(e.object) {
                    self.matrices += e.bytes;
                }
            }
            EventKind::Evict => {
                let pos = self
                    .items
                    .iter()
                    .position(|&(o, l, _)| o == e.object && l == e.level)
                    .ok_or("evicting an object that is not resident")?;
                let (_, _, bytes) = self.items.swap_remove(pos);
                if bytes != e.bytes {
                    return Err("eviction size differs from allocation");
                }
                self.total -= bytes;
                if is_matrix(e.object) {
                    self.matrices -= bytes;
                }
            }
            _ => {}
        }
        self.peak = self.peak.max(self.total);
        self.peak_matrices = self.peak_matrices.max(self.matrices);
        Ok(())
    }
}

struct Builder<'a> {
    h: &'a Hierarchy,
    bm: BytesModel,
    events: Vec<Event>,
}

impl<'a> Builder<'a> {
    fn a(&self, i: usize) -> usize {
        self.bm.csr_bytes(&self.h.level(i).a)
    }

    fn p(&self, i: usize) -> usize {
        self.bm
            .csr_bytes(self.h.level(i).p.as_ref().expect("non-coarsest level"))
    }

    fn v(&self, i: usize) -> usize {
        self.bm.vector_bytes(self.h.level(i).size())
    }

    fn push(&mut self, kind: EventKind, object: &'static str, bytes: usize, level: usize) {
        self.events.push(Event {
            kind,
            object,
            bytes,
            level,
            repeat: 1,
        });
    }

    fn data(&mut self, kind: EventKind, object: &'static str, level: usize) {
        let bytes = match object {
            "A" => self.a(level),
            "P" => self.p(level),
            _ => self.v(level),
        };
        self.push(kind, object, bytes, level);
    }

    fn compute(&mut self, kind: EventKind, op: &'static str, level: usize, repeat: usize) {
        self.events.push(Event {
            kind,
            object: op,
            bytes: 0,
            level,
            repeat,
        });
    }
}

fn finish(scheme: Scheme, setup_events: Vec<Event>, events: Vec<Event>) -> MemoryPlan {
    let mut dev = Residency::default();
    for e in &setup_events {
        dev.apply(e).expect("setup events are consistent");
    }
    let resident_setup_bytes = dev.total;
    for e in &events {
        dev.apply(e).expect("cycle events are consistent");
    }
    let per_cycle_transfer_bytes = events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::TransferToDevice | EventKind::TransferToHost))
        .map(|e| e.bytes)
        .sum();
    MemoryPlan {
        scheme,
        setup_events,
        events,
        peak_device_bytes: dev.peak,
        peak_device_matrix_bytes: dev.peak_matrices,
        resident_setup_bytes,
        per_cycle_transfer_bytes,
    }
}

/// Event timeline of one V-cycle under the level-streaming (CI) placement.
pub fn plan_ci(h: &Hierarchy, params: &CycleParams, bm: BytesModel) -> MemoryPlan {
    use EventKind::*;
    let levels = h.num_levels();
    let coarsest = levels - 1;
    let mut b = Builder {
        h,
        bm,
        events: Vec::new(),
    };

    // down-sweep
    for i in 0..coarsest {
        if i == 0 {
            b.data(TransferToDevice, "A", 0);
            b.data(TransferToDevice, "f", 0);
            b.data(TransferToDevice, "u", 0);
        } else {
            // A_i arrived during the previous level's smoothing
            b.data(TransferToDevice, "f", i);
            b.data(AllocateDevice, "u", i);
        }
        b.data(TransferToDevice, "P", i);
        b.data(TransferToDevice, "A", i + 1);
        b.compute(ComputeDevice, "pre-smooth", i, params.pre_sweeps);
        b.data(AllocateDevice, "r", i);
        b.compute(ComputeDevice, "residual", i, 1);
        b.data(AllocateDevice, "f", i + 1);
        b.compute(ComputeDevice, "restrict", i, 1);
        b.data(TransferToHost, "f", i + 1);
        b.data(Evict, "f", i + 1);
        b.data(TransferToHost, "u", i);
        for obj in ["r", "u", "f", "A", "P"] {
            b.data(Evict, obj, i);
        }
    }

    b.compute(ComputeHost, "coarse-solve", coarsest, 1);
    if coarsest > 0 {
        b.data(Evict, "A", coarsest);
        b.data(TransferToDevice, "u", coarsest);
    }

    // up-sweep
    for i in (0..coarsest).rev() {
        b.data(TransferToDevice, "P", i);
        b.data(TransferToDevice, "u", i);
        b.data(TransferToDevice, "A", i);
        b.data(TransferToDevice, "f", i);
        b.compute(ComputeDevice, "prolongate", i, 1);
        b.data(Evict, "u", i + 1);
        b.data(Evict, "P", i);
        if i + 1 < coarsest {
            b.data(Evict, "A", i + 1);
            b.data(Evict, "f", i + 1);
        }
        b.compute(ComputeDevice, "post-smooth", i, params.post_sweeps);
    }
    if coarsest > 0 {
        b.data(TransferToHost, "u", 0);
        for obj in ["u", "A", "f"] {
            b.data(Evict, obj, 0);
        }
    }
    finish(Scheme::Ci, Vec::new(), b.events)
}

/// Setup residency and one V-cycle under the resident-hierarchy (MI)
/// placement.
pub fn plan_mi(h: &Hierarchy, params: &CycleParams, bm: BytesModel) -> MemoryPlan {
    use EventKind::*;
    let levels = h.num_levels();
    let coarsest = levels - 1;
    let mut setup = Builder {
        h,
        bm,
        events: Vec::new(),
    };
    for i in 0..coarsest {
        setup.data(TransferToDevice, "A", i);
        setup.data(TransferToDevice, "P", i);
        for obj in ["u", "f", "r"] {
            setup.data(AllocateDevice, obj, i);
        }
    }
    if coarsest > 0 {
        setup.data(AllocateDevice, "f", coarsest);
    }

    let mut b = Builder {
        h,
        bm,
        events: Vec::new(),
    };
    for i in 0..coarsest {
        b.compute(ComputeDevice, "pre-smooth", i, params.pre_sweeps);
        b.compute(ComputeDevice, "residual", i, 1);
        b.compute(ComputeDevice, "restrict", i, 1);
    }
    if coarsest > 0 {
        b.data(TransferToHost, "f", coarsest);
    }
    b.compute(ComputeHost, "coarse-solve", coarsest, 1);
    if coarsest > 0 {
        b.data(TransferToDevice, "u", coarsest);
    }
    for i in (0..coarsest).rev() {
        b.compute(ComputeDevice, "prolongate", i, 1);
        if i + 1 == coarsest {
            b.data(Evict, "u", coarsest);
        }
        b.compute(ComputeDevice, "post-smooth", i, params.post_sweeps);
    }
    finish(Scheme::Mi, setup.events, b.events)
}

/// Side-by-side figures of both placements.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeComparison {
    pub ci: MemoryPlan,
    pub mi: MemoryPlan,
}

impl SchemeComparison {
    /// `peak(CI) / resident(MI)`; `None` when MI keeps nothing resident.
    pub fn device_ratio(&self) -> Option<f64> {
        ratio(self.ci.peak_device_bytes, self.mi.resident_setup_bytes)
    }

    /// `transfer(CI) / transfer(MI)` per cycle; `None` when MI moves nothing.
    pub fn transfer_ratio(&self) -> Option<f64> {
        ratio(self.ci.per_cycle_transfer_bytes, self.mi.per_cycle_transfer_bytes)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den != 0).then(|| num as f64 / den as f64)
}

pub fn compare_schemes(h: &Hierarchy, params: &CycleParams, bm: BytesModel) -> SchemeComparison {
    SchemeComparison {
        ci: plan_ci(h, params, bm),
        mi: plan_mi(h, params, bm),
    }
}
