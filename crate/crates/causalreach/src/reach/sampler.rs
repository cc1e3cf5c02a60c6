//! Deterministic parallel trajectory sampling.
//!
//! Trajectory `i` draws all of its randomness from the stream keyed by
//! `(seed, i)`, so the sampled set is a pure function of the
//! configuration. Workers fold into private accumulators that are merged
//! with an associative, commutative operation; the schedule cannot affect
//! the result.

use rand::Rng;
use rayon::prelude::*;

use super::{Direction, ReachConfig};
use crate::curves::{self, ControlLaw, DomainExit, Strictness};
use crate::error::Result;
use crate::geometry::{Scratch, SubSpaceTime};
use crate::rng;

/// Accumulator fed by sampled trajectories.
pub trait TrajectorySink: Send + Sized {
    /// Fresh accumulator with the same shape as `self`.
    fn fresh(&self) -> Self;
    /// Called for the start point and after every accepted substep.
    fn node(&mut self, traj: u64, t: f64, p: &[f64], cumlen: f64);
    /// Called once per trajectory after integration.
    fn finish(&mut self, _traj: u64, _exit: Option<DomainExit>) {}
    /// Associative, commutative merge.
    fn merge(&mut self, other: Self);
}

/// Draws one trajectory's control rows (`u0 = 1`).
///
/// A per-trajectory mixture of three profiles is used: straight rays
/// (constant direction), single-switch sweeps (two directions with a
/// uniformly placed switch row) and independent per-row draws. All three
/// stay supported on the closed control cone shrunk by `1 - margin`; rays
/// and sweeps give sampling mass to sustained near-boundary directions
/// that independent rows cannot reach at realistic sample counts.
pub(crate) fn draw_rows<R: Rng>(
    rng: &mut R,
    steps: usize,
    k: usize,
    margin: f64,
    rows: &mut Vec<f64>,
) {
    rows.clear();
    let d = k - 1;
    let scale = 1.0 - margin;
    let mut dir1 = vec![0.0; d];
    let strategy: f64 = rng.gen();
    if strategy < 0.25 {
        rng::unit_ball(rng, &mut dir1);
        for _ in 0..steps {
            rows.push(1.0);
            rows.extend(dir1.iter().map(|x| x * scale));
        }
    } else if strategy < 0.75 {
        let mut dir2 = vec![0.0; d];
        rng::unit_ball(rng, &mut dir1);
        rng::unit_ball(rng, &mut dir2);
        let switch = rng.gen_range(0..=steps);
        for r in 0..steps {
            let dir = if r < switch { &dir1 } else { &dir2 };
            rows.push(1.0);
            rows.extend(dir.iter().map(|x| x * scale));
        }
    } else {
        for _ in 0..steps {
            rng::unit_ball(rng, &mut dir1);
            rows.push(1.0);
            rows.extend(dir1.iter().map(|x| x * scale));
        }
    }
}

fn run_lead<S: TrajectorySink>(
    st: &SubSpaceTime,
    p: &[f64],
    law: &ControlLaw,
    traj: u64,
    direction: Direction,
    cfg: &ReachConfig,
    scratch: &mut Scratch,
    sink: &mut S,
) -> Result<()> {
    let n = st.dim();
    let k = st.rank();
    let total_steps = cfg.steps * cfg.substeps;
    let h = cfg.horizon / total_steps as f64;
    let sign = direction.sign();
    let clip_timelike = cfg.strictness == Strictness::Timelike;

    let mut pt = p.to_vec();
    let mut u = vec![0.0; k];
    let mut ptmp = vec![0.0; n];
    let mut pnew = vec![0.0; n];
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut t = 0.0;
    let mut cumlen = 0.0;
    sink.node(traj, t, &pt, cumlen);

    for s in 0..total_steps {
        (law.eval)(t, &pt, &mut u);
        let sp2: f64 = u[1..].iter().map(|x| x * x).sum();
        let eta = sp2 - u[0] * u[0];
        let invalid = !(u[0] > 0.0) || eta > 1e-9 * u[0] * u[0];
        let clipped = clip_timelike && eta >= -1e-9 * u[0] * u[0];
        if invalid || clipped {
            sink.finish(traj, Some(DomainExit { time: t, step: s }));
            return Ok(());
        }
        let dlen = h * (-eta).max(0.0).sqrt();

        let stage = |tt: f64, pp: &[f64], out: &mut Vec<f64>, scratch: &mut Scratch, u: &mut Vec<f64>| -> Result<()> {
            (law.eval)(tt, pp, u);
            curves::velocity_of(st, scratch, pp, u, sign, out)
        };
        stage(t, &pt, &mut k1, scratch, &mut u)?;
        for i in 0..n {
            ptmp[i] = pt[i] + 0.5 * h * k1[i];
        }
        stage(t + 0.5 * h, &ptmp, &mut k2, scratch, &mut u)?;
        for i in 0..n {
            ptmp[i] = pt[i] + 0.5 * h * k2[i];
        }
        stage(t + 0.5 * h, &ptmp, &mut k3, scratch, &mut u)?;
        for i in 0..n {
            ptmp[i] = pt[i] + h * k3[i];
        }
        stage(t + h, &ptmp, &mut k4, scratch, &mut u)?;
        for i in 0..n {
            pnew[i] = pt[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !st.contains(&pnew) || !st.segment_allowed(&pt, &pnew) {
            sink.finish(traj, Some(DomainExit { time: t, step: s }));
            return Ok(());
        }
        pt.copy_from_slice(&pnew);
        t += h;
        cumlen += dlen;
        sink.node(traj, t, &pt, cumlen);
    }
    sink.finish(traj, None);
    Ok(())
}

fn run_random<S: TrajectorySink>(
    st: &SubSpaceTime,
    p: &[f64],
    traj: u64,
    direction: Direction,
    cfg: &ReachConfig,
    scratch: &mut Scratch,
    rows: &mut Vec<f64>,
    sink: &mut S,
) -> Result<()> {
    let k = st.rank();
    let mut stream = rng::stream(cfg.seed, traj);
    draw_rows(&mut stream, cfg.steps, k, cfg.cone_margin, rows);
    let spec = curves::FlowSpec {
        rows,
        rank: k,
        dt_row: cfg.horizon / cfg.steps as f64,
        substeps: cfg.substeps,
        sign: direction.sign(),
        clip_timelike: cfg.strictness == Strictness::Timelike,
    };
    let exit = curves::flow(st, p, &spec, scratch, |t, q, len| sink.node(traj, t, q, len))?;
    sink.finish(traj, exit);
    Ok(())
}

/// Runs the lead laws (index 0 is always the central ray) followed by
/// `cfg.samples` random trajectories, folding into `template`-shaped
/// accumulators.
pub(crate) fn sample_into<S: TrajectorySink + Sync>(
    st: &SubSpaceTime,
    p: &[f64],
    direction: Direction,
    cfg: &ReachConfig,
    leads: &[ControlLaw],
    template: &S,
) -> Result<S> {
    let k = st.rank();
    let central = ControlLaw::central_ray(k);
    let mut all_leads: Vec<&ControlLaw> = vec![&central];
    all_leads.extend(leads.iter());
    let lead_count = all_leads.len() as u64;
    let total = cfg.samples as u64 + lead_count;

    let result = (0..total)
        .into_par_iter()
        .try_fold(
            || (template.fresh(), Scratch::for_st(st), Vec::new()),
            |(mut sink, mut scratch, mut rows), traj| -> Result<(S, Scratch, Vec<f64>)> {
                if traj < lead_count {
                    run_lead(
                        st,
                        p,
                        all_leads[traj as usize],
                        traj,
                        direction,
                        cfg,
                        &mut scratch,
                        &mut sink,
                    )?;
                } else {
                    run_random(
                        st,
                        p,
                        traj,
                        direction,
                        cfg,
                        &mut scratch,
                        &mut rows,
                        &mut sink,
                    )?;
                }
                Ok((sink, scratch, rows))
            },
        )
        .map(|r| r.map(|(sink, _, _)| sink))
        .try_reduce(
            || template.fresh(),
            |mut a, b| {
                a.merge(b);
                Ok(a)
            },
        )?;
    Ok(result)
}
