use std::collections::HashMap;
use std::fmt;

use iesplan_milp::VarKind;

/// Semantic name of one model column. `i` indexes the catalog's fuel cells,
/// `j` the EVs of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKey {
    XEss,
    XFc { i: usize },
    Grid { s: usize, t: usize },
    Fuel { s: usize, t: usize, i: usize },
    Pv { s: usize, t: usize },
    BessCh { s: usize, t: usize },
    BessDis { s: usize, t: usize },
    BessE { s: usize, t: usize },
    TessCh { s: usize, t: usize },
    TessDis { s: usize, t: usize },
    TessE { s: usize, t: usize },
    YBess { s: usize, t: usize },
    YTess { s: usize, t: usize },
    EvCh { s: usize, t: usize, j: usize },
    EvDis { s: usize, t: usize, j: usize },
    EvE { s: usize, t: usize, j: usize },
    YEv { s: usize, t: usize, j: usize },
    Shortfall { s: usize, j: usize },
    Z { s: usize },
}

impl VarKey {
    pub fn kind(&self) -> VarKind {
        match self {
            VarKey::XFc { .. } => VarKind::Integer,
            VarKey::YBess { .. } | VarKey::YTess { .. } | VarKey::YEv { .. } | VarKey::Z { .. } => VarKind::Binary,
            _ => VarKind::Continuous,
        }
    }

    pub fn scenario(&self) -> Option<usize> {
        match *self {
            VarKey::XEss | VarKey::XFc { .. } => None,
            VarKey::Grid { s, .. }
            | VarKey::Fuel { s, .. }
            | VarKey::Pv { s, .. }
            | VarKey::BessCh { s, .. }
            | VarKey::BessDis { s, .. }
            | VarKey::BessE { s, .. }
            | VarKey::TessCh { s, .. }
            | VarKey::TessDis { s, .. }
            | VarKey::TessE { s, .. }
            | VarKey::YBess { s, .. }
            | VarKey::YTess { s, .. }
            | VarKey::EvCh { s, .. }
            | VarKey::EvDis { s, .. }
            | VarKey::EvE { s, .. }
            | VarKey::YEv { s, .. }
            | VarKey::Shortfall { s, .. }
            | VarKey::Z { s } => Some(s),
        }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarKey::XEss => write!(f, "X_ESS"),
            VarKey::XFc { i } => write!(f, "X_FC_{i}"),
            VarKey::Grid { s, t } => write!(f, "P_grid_s{s}_t{t}"),
            VarKey::Fuel { s, t, i } => write!(f, "P_fuel_s{s}_t{t}_i{i}"),
            VarKey::Pv { s, t } => write!(f, "P_pv_s{s}_t{t}"),
            VarKey::BessCh { s, t } => write!(f, "P_bess_ch_s{s}_t{t}"),
            VarKey::BessDis { s, t } => write!(f, "P_bess_dis_s{s}_t{t}"),
            VarKey::BessE { s, t } => write!(f, "E_bess_s{s}_t{t}"),
            VarKey::TessCh { s, t } => write!(f, "P_tess_ch_s{s}_t{t}"),
            VarKey::TessDis { s, t } => write!(f, "P_tess_dis_s{s}_t{t}"),
            VarKey::TessE { s, t } => write!(f, "E_tess_s{s}_t{t}"),
            VarKey::YBess { s, t } => write!(f, "Y_bess_s{s}_t{t}"),
            VarKey::YTess { s, t } => write!(f, "Y_tess_s{s}_t{t}"),
            VarKey::EvCh { s, t, j } => write!(f, "P_ev_ch_s{s}_t{t}_j{j}"),
            VarKey::EvDis { s, t, j } => write!(f, "P_ev_dis_s{s}_t{t}_j{j}"),
            VarKey::EvE { s, t, j } => write!(f, "E_ev_s{s}_t{t}_j{j}"),
            VarKey::YEv { s, t, j } => write!(f, "Y_ev_s{s}_t{t}_j{j}"),
            VarKey::Shortfall { s, j } => write!(f, "d_s{s}_j{j}"),
            VarKey::Z { s } => write!(f, "Z_s{s}"),
        }
    }
}

/// Bijection between semantic keys and contiguous column ids.
#[derive(Debug, Clone, Default)]
pub struct VarIndex {
    keys: Vec<VarKey>,
    ids: HashMap<VarKey, usize>,
}

impl VarIndex {
    pub(crate) fn push(&mut self, key: VarKey) -> usize {
        let id = self.keys.len();
        let prev = self.ids.insert(key, id);
        debug_assert!(prev.is_none(), "duplicate key {key}");
        self.keys.push(key);
        id
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn get(&self, key: VarKey) -> Option<usize> {
        self.ids.get(&key).copied()
    }

    /// Column of a key the builders know exists.
    pub(crate) fn col(&self, key: VarKey) -> usize {
        self.ids[&key]
    }

    pub fn key(&self, col: usize) -> VarKey {
        self.keys[col]
    }

    pub fn keys(&self) -> &[VarKey] {
        &self.keys
    }

    pub fn count(&self, pred: impl Fn(&VarKey) -> bool) -> usize {
        self.keys.iter().filter(|k| pred(k)).count()
    }
}
