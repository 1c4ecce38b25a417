use iesplan_milp::{Row, Sense};

use super::index::{VarIndex, VarKey};
use super::{ModelContext, RowFamily};
use crate::types::YUAN_PER_MODEL_UNIT;

type Rows = Vec<(RowFamily, Row)>;

fn push(out: &mut Rows, fam: RowFamily, name: String, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
    out.push((fam, Row::new(name, coeffs, sense, rhs)));
}

/// Investment costs in ¥10⁴; operating costs are per scenario-day in ¥ and
/// scaled by the annualization factor, which already divides by N.
pub fn build_objective(ctx: &ModelContext<'_>, idx: &VarIndex) -> Vec<f64> {
    let cat = &ctx.case.catalog;
    let tar = &ctx.case.tariffs;
    let op = ctx.annualization / YUAN_PER_MODEL_UNIT;
    idx.keys()
        .iter()
        .map(|key| match *key {
            VarKey::XEss => cat.bess.invest_cost,
            VarKey::XFc { i } => cat.fuel_cells[i].invest_cost,
            VarKey::Fuel { i, .. } => {
                let fc = &cat.fuel_cells[i];
                op * (fc.fuel_price + tar.carbon_tax * fc.fuel_emission)
            }
            VarKey::Grid { t, .. } => op * (tar.elec_price[t] + tar.carbon_tax * tar.grid_emission[t]),
            VarKey::Shortfall { .. } => op * tar.soc_penalty,
            _ => 0.0,
        })
        .collect()
}

/// Column bounds. Every bound is finite.
pub fn column_bounds(ctx: &ModelContext<'_>, key: &VarKey) -> (f64, f64) {
    let cat = &ctx.case.catalog;
    let tar = &ctx.case.tariffs;
    let b = &cat.bess;
    let ev = &cat.ev_fleet;
    let sc = |s: usize| &ctx.scenarios.scenarios[s];
    match *key {
        VarKey::XEss => (0.0, b.max_capacity_kwh),
        VarKey::XFc { i } => (0.0, cat.fuel_cells[i].max_units as f64),
        VarKey::Grid { .. } => (0.0, tar.grid_cap_kw),
        VarKey::Fuel { i, .. } => (0.0, cat.fuel_cells[i].max_fuel_kw()),
        VarKey::Pv { s, t } => (0.0, sc(s).pv_avail[t].min(tar.pv_cap_kw)),
        VarKey::BessCh { .. } | VarKey::BessDis { .. } => (0.0, b.rate_fraction * b.max_capacity_kwh),
        VarKey::BessE { .. } => (0.0, b.soc_max * b.max_capacity_kwh),
        VarKey::TessCh { .. } | VarKey::TessDis { .. } => (0.0, cat.tess.max_rate_kw()),
        VarKey::TessE { .. } => (0.0, cat.tess.capacity_kwh),
        VarKey::YBess { .. } | VarKey::YTess { .. } | VarKey::YEv { .. } => (0.0, 1.0),
        VarKey::EvCh { .. } => (0.0, ev.charger_kw),
        VarKey::EvDis { .. } => (0.0, ev.max_discharge_kw()),
        VarKey::EvE { s, t, j } => {
            let rec = &sc(s).evs[j];
            if t == rec.arrive_hour {
                let e0 = rec.initial_soc * ev.capacity_kwh;
                (e0, e0)
            } else {
                (ev.soc_min * ev.capacity_kwh, ev.soc_max * ev.capacity_kwh)
            }
        }
        VarKey::Shortfall { .. } => (0.0, ev.max_shortfall_kwh()),
        VarKey::Z { s } => {
            let allowed = !sc(s).evs.is_empty() && ctx.config.max_substandard(ctx.grid.n_scenarios) > 0;
            (0.0, if allowed { 1.0 } else { 0.0 })
        }
    }
}

pub(super) fn balance_rows(ctx: &ModelContext<'_>, idx: &VarIndex, s: usize, out: &mut Rows) {
    let cat = &ctx.case.catalog;
    let sc = &ctx.scenarios.scenarios[s];
    let (b, th, ev) = (&cat.bess, &cat.tess, &cat.ev_fleet);
    for t in 0..ctx.grid.hours {
        let mut e = vec![(idx.col(VarKey::Pv { s, t }), 1.0), (idx.col(VarKey::Grid { s, t }), 1.0)];
        let mut h = Vec::new();
        for (i, fc) in cat.fuel_cells.iter().enumerate() {
            let col = idx.col(VarKey::Fuel { s, t, i });
            e.push((col, fc.gas_to_elec));
            h.push((col, fc.gas_to_heat));
        }
        e.push((idx.col(VarKey::BessCh { s, t }), -1.0 / b.eta_ch));
        e.push((idx.col(VarKey::BessDis { s, t }), b.eta_dis));
        for j in 0..sc.evs.len() {
            if let Some(c) = idx.get(VarKey::EvCh { s, t, j }) {
                e.push((c, -1.0 / ev.eta_ch));
                e.push((idx.col(VarKey::EvDis { s, t, j }), ev.eta_dis));
            }
        }
        h.push((idx.col(VarKey::TessCh { s, t }), -1.0 / th.eta_ch));
        h.push((idx.col(VarKey::TessDis { s, t }), th.eta_dis));
        push(out, RowFamily::ElecBalance, format!("bal_e_s{s}_t{t}"), e, Sense::Eq, sc.elec_load[t]);
        push(out, RowFamily::HeatBalance, format!("bal_h_s{s}_t{t}"), h, Sense::Ge, sc.heat_load[t]);
    }
}

pub(super) fn fc_rows(ctx: &ModelContext<'_>, idx: &VarIndex, s: usize, out: &mut Rows) {
    let cat = &ctx.case.catalog;
    for t in 0..ctx.grid.hours {
        for (i, fc) in cat.fuel_cells.iter().enumerate() {
            let fuel = idx.col(VarKey::Fuel { s, t, i });
            let x = idx.col(VarKey::XFc { i });
            let pairs = [("fc_e", fc.gas_to_elec, fc.max_elec_kw), ("fc_h", fc.gas_to_heat, fc.max_heat_kw)];
            for (tag, conv, cap) in pairs {
                push(
                    out,
                    RowFamily::FcOutput,
                    format!("{tag}_s{s}_t{t}_i{i}"),
                    vec![(fuel, conv), (x, -cap)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
}

/// E(t) - E(t-1) - ch(t-1) + dis(t-1) = 0 for t = 1..T-1 and the cyclic
/// closure E(0) = E(T-1) + ch(T-1) - dis(T-1).
fn storage_dynamics(
    hours: usize,
    fam: RowFamily,
    tag: &str,
    s: usize,
    cols: impl Fn(usize) -> (usize, usize, usize),
    out: &mut Rows,
) {
    for t in 0..hours {
        let prev = if t == 0 { hours - 1 } else { t - 1 };
        let (e, _, _) = cols(t);
        let (ep, chp, disp) = cols(prev);
        let name = if t == 0 { format!("{tag}_cyc_s{s}") } else { format!("{tag}_dyn_s{s}_t{t}") };
        let coeffs =
            if e == ep { vec![(chp, -1.0), (disp, 1.0)] } else { vec![(e, 1.0), (ep, -1.0), (chp, -1.0), (disp, 1.0)] };
        push(out, fam, name, coeffs, Sense::Eq, 0.0);
    }
}

pub(super) fn bess_rows(ctx: &ModelContext<'_>, idx: &VarIndex, s: usize, out: &mut Rows) {
    let b = &ctx.case.catalog.bess;
    let hours = ctx.grid.hours;
    let x = idx.col(VarKey::XEss);
    let cols = |t: usize| {
        (idx.col(VarKey::BessE { s, t }), idx.col(VarKey::BessCh { s, t }), idx.col(VarKey::BessDis { s, t }))
    };
    for t in 0..hours {
        let (e, _, _) = cols(t);
        push(out, RowFamily::BessSoc, format!("bess_soclo_s{s}_t{t}"), vec![(e, 1.0), (x, -b.soc_min)], Sense::Ge, 0.0);
        push(out, RowFamily::BessSoc, format!("bess_sochi_s{s}_t{t}"), vec![(e, 1.0), (x, -b.soc_max)], Sense::Le, 0.0);
    }
    storage_dynamics(hours, RowFamily::BessDynamics, "bess", s, cols, out);
    for t in 0..hours {
        let (_, ch, dis) = cols(t);
        push(
            out,
            RowFamily::BessRate,
            format!("bess_rch_s{s}_t{t}"),
            vec![(ch, 1.0), (x, -b.rate_fraction)],
            Sense::Le,
            0.0,
        );
        push(
            out,
            RowFamily::BessRate,
            format!("bess_rdis_s{s}_t{t}"),
            vec![(dis, 1.0), (x, -b.rate_fraction)],
            Sense::Le,
            0.0,
        );
    }
    let days = ctx.grid.planning_years as f64 * 365.0;
    let mut life: Vec<(usize, f64)> = (0..hours).map(|t| (cols(t).1, days)).collect();
    life.push((x, -b.lifetime_cycles));
    push(out, RowFamily::BessLifetime, format!("bess_life_s{s}"), life, Sense::Le, 0.0);
    if ctx.binary() {
        let m = b.rate_fraction * b.max_capacity_kwh;
        for t in 0..hours {
            let (_, ch, dis) = cols(t);
            let y = idx.col(VarKey::YBess { s, t });
            push(
                out,
                RowFamily::BessExclusive,
                format!("bess_ych_s{s}_t{t}"),
                vec![(ch, 1.0), (y, -m)],
                Sense::Le,
                0.0,
            );
            push(out, RowFamily::BessExclusive, format!("bess_ydis_s{s}_t{t}"), vec![(dis, 1.0), (y, m)], Sense::Le, m);
        }
    }
}

pub(super) fn tess_rows(ctx: &ModelContext<'_>, idx: &VarIndex, s: usize, out: &mut Rows) {
    let tess = &ctx.case.catalog.tess;
    let hours = ctx.grid.hours;
    let cols = |t: usize| {
        (idx.col(VarKey::TessE { s, t }), idx.col(VarKey::TessCh { s, t }), idx.col(VarKey::TessDis { s, t }))
    };
    storage_dynamics(hours, RowFamily::TessDynamics, "tess", s, cols, out);
    if ctx.binary() {
        let m = tess.max_rate_kw();
        for t in 0..hours {
            let (_, ch, dis) = cols(t);
            let y = idx.col(VarKey::YTess { s, t });
            push(
                out,
                RowFamily::TessExclusive,
                format!("tess_ych_s{s}_t{t}"),
                vec![(ch, 1.0), (y, -m)],
                Sense::Le,
                0.0,
            );
            push(out, RowFamily::TessExclusive, format!("tess_ydis_s{s}_t{t}"), vec![(dis, 1.0), (y, m)], Sense::Le, m);
        }
    }
}

/// Columns whose sum is the energy an EV leaves with:
/// E(dep-1) + ch(dep-1) - dis(dep-1).
pub(crate) fn departure_terms(idx: &VarIndex, s: usize, j: usize, depart: usize) -> [(usize, f64); 3] {
    let t = depart - 1;
    [
        (idx.col(VarKey::EvE { s, t, j }), 1.0),
        (idx.col(VarKey::EvCh { s, t, j }), 1.0),
        (idx.col(VarKey::EvDis { s, t, j }), -1.0),
    ]
}

pub(super) fn ev_rows(ctx: &ModelContext<'_>, idx: &VarIndex, s: usize, out: &mut Rows) {
    let ev = &ctx.case.catalog.ev_fleet;
    for (j, rec) in ctx.scenarios.scenarios[s].evs.iter().enumerate() {
        for t in rec.arrive_hour + 1..rec.depart_hour {
            let p = t - 1;
            let coeffs = vec![
                (idx.col(VarKey::EvE { s, t, j }), 1.0),
                (idx.col(VarKey::EvE { s, t: p, j }), -1.0),
                (idx.col(VarKey::EvCh { s, t: p, j }), -1.0),
                (idx.col(VarKey::EvDis { s, t: p, j }), 1.0),
            ];
            push(out, RowFamily::EvDynamics, format!("ev_dyn_s{s}_t{t}_j{j}"), coeffs, Sense::Eq, 0.0);
        }
        let lo = ev.soc_min * ev.capacity_kwh;
        let hi = ev.soc_max * ev.capacity_kwh;
        let mut row =
            Row::new(format!("ev_dep_s{s}_j{j}"), departure_terms(idx, s, j, rec.depart_hour).to_vec(), Sense::Ge, lo);
        row.range = Some(hi - lo);
        out.push((RowFamily::EvDeparture, row));
        if ctx.binary() {
            let (mc, md) = (ev.charger_kw, ev.max_discharge_kw());
            for t in rec.parked_hours() {
                let y = idx.col(VarKey::YEv { s, t, j });
                let ch = idx.col(VarKey::EvCh { s, t, j });
                let dis = idx.col(VarKey::EvDis { s, t, j });
                push(
                    out,
                    RowFamily::EvExclusive,
                    format!("ev_ych_s{s}_t{t}_j{j}"),
                    vec![(ch, 1.0), (y, -mc)],
                    Sense::Le,
                    0.0,
                );
                push(
                    out,
                    RowFamily::EvExclusive,
                    format!("ev_ydis_s{s}_t{t}_j{j}"),
                    vec![(dis, 1.0), (y, md)],
                    Sense::Le,
                    md,
                );
            }
        }
    }
}

/// d + E_dep >= target·Emax and d <= M·Z with M = (target - soc_min)·Emax.
pub(super) fn shortfall_rows(ctx: &ModelContext<'_>, idx: &VarIndex, s: usize, out: &mut Rows) {
    let ev = &ctx.case.catalog.ev_fleet;
    let z = idx.col(VarKey::Z { s });
    let big_m = ev.max_shortfall_kwh();
    for (j, rec) in ctx.scenarios.scenarios[s].evs.iter().enumerate() {
        let d = idx.col(VarKey::Shortfall { s, j });
        let mut coeffs = departure_terms(idx, s, j, rec.depart_hour).to_vec();
        coeffs.push((d, 1.0));
        let target = ev.target_departure_soc * ev.capacity_kwh;
        push(out, RowFamily::Shortfall, format!("short_s{s}_j{j}"), coeffs, Sense::Ge, target);
        push(out, RowFamily::Shortfall, format!("shortm_s{s}_j{j}"), vec![(d, 1.0), (z, -big_m)], Sense::Le, 0.0);
    }
}

pub(super) fn cardinality_row(ctx: &ModelContext<'_>, idx: &VarIndex) -> Row {
    let coeffs = (0..ctx.grid.n_scenarios).map(|s| (idx.col(VarKey::Z { s }), 1.0)).collect();
    Row::new("chance_card", coeffs, Sense::Le, ctx.config.max_substandard(ctx.grid.n_scenarios) as f64)
}

fn collect(
    ctx: &ModelContext<'_>,
    idx: &VarIndex,
    f: impl Fn(&ModelContext<'_>, &VarIndex, usize, &mut Rows),
) -> Vec<Row> {
    let mut out = Vec::new();
    for s in 0..ctx.grid.n_scenarios {
        f(ctx, idx, s, &mut out);
    }
    out.into_iter().map(|(_, r)| r).collect()
}

pub fn build_energy_balance(ctx: &ModelContext<'_>, idx: &VarIndex) -> Vec<Row> {
    collect(ctx, idx, balance_rows)
}

/// Column bounds for every column plus the fuel-cell output rows.
pub fn build_device_bounds(ctx: &ModelContext<'_>, idx: &VarIndex) -> (Vec<(f64, f64)>, Vec<Row>) {
    let bounds = idx.keys().iter().map(|k| column_bounds(ctx, k)).collect();
    (bounds, collect(ctx, idx, fc_rows))
}

pub fn build_bess_constraints(ctx: &ModelContext<'_>, idx: &VarIndex) -> Vec<Row> {
    collect(ctx, idx, bess_rows)
}

pub fn build_tess_constraints(ctx: &ModelContext<'_>, idx: &VarIndex) -> Vec<Row> {
    collect(ctx, idx, tess_rows)
}

pub fn build_ev_constraints(ctx: &ModelContext<'_>, idx: &VarIndex) -> Vec<Row> {
    collect(ctx, idx, ev_rows)
}

pub fn build_chance_constraints(ctx: &ModelContext<'_>, idx: &VarIndex) -> Vec<Row> {
    let mut rows = collect(ctx, idx, shortfall_rows);
    rows.push(cardinality_row(ctx, idx));
    rows
}
