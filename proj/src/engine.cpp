#include "terafet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "terafet/constants.hpp"

namespace terafet {

void SolverConfig::validate() const {
  if (steps_per_cycle < 50)
    throw std::invalid_argument("SolverConfig.steps_per_cycle: must be >= 50");
  if (max_cycles < 1)
    throw std::invalid_argument("SolverConfig.max_cycles: must be >= 1");
  if (settle_tol <= 0.0 || newton_tol_v <= 0.0 || newton_tol_i <= 0.0)
    throw std::invalid_argument("SolverConfig: tolerances must be > 0");
  if (newton_max_iter < 1)
    throw std::invalid_argument("SolverConfig.newton_max_iter: must be >= 1");
  if (min_cycles < 4)
    throw std::invalid_argument("SolverConfig.min_cycles: must be >= 4");
  if (settle_quiet_cycles < 1)
    throw std::invalid_argument("SolverConfig.settle_quiet_cycles: must be >= 1");
}

double node_voltage(const SegmentedCircuit& c, const Eigen::VectorXd& x,
                    int node) {
  (void)c;
  return node == 0 ? 0.0 : x[node - 1];
}

MnaSystem::MnaSystem(const SegmentedCircuit& c)
    : ckt_(c), nv_(c.n_nodes - 1), nb_(c.n_branches) {
  st_.resize(c.elements.size());
}

MnaSystem::DrudeEval MnaSystem::eval_drude(const Element& e,
                                           const Eigen::VectorXd& x) const {
  DrudeEval ev{e.value, 0.0, 0.0, 0.0};
  if (e.ctrl_len <= 0.0) return ev; // fixed-value inductor
  const DeviceParams& p = ckt_.params;
  const double vg = volt(x, e.gate);
  const double vs = volt(x, e.ctrl_s);
  const double vd = volt(x, e.ctrl_d);
  const double g = segment_conductance(p, vg, vs, vd, e.ctrl_len);
  const double tau = p.tau();
  if (g < g_floor) {
    ev.l = tau / (e.divide * g_floor);
    return ev; // clamp engaged, derivative flat
  }
  ev.l = tau / (e.divide * g);
  const double dns = constants::q_e * uccm_density_dvg(p, vg, vd);
  const double dg_dvg = p.width * p.mobility / e.ctrl_len * dns;
  const double dl_dg = -tau / (e.divide * g * g);
  ev.dl_dvg = dl_dg * dg_dvg;
  ev.dl_dvd = dl_dg * (-dg_dvg);
  ev.dl_dvs = 0.0;
  return ev;
}

MnaSystem::KineticEval MnaSystem::eval_kinetic(const Element& e,
                                               const Eigen::VectorXd& x) const {
  KineticEval kv;
  if (e.kin_s < 0) return kv;
  const DeviceParams& p = ckt_.params;
  const double vg = volt(x, e.gate);
  const double c = p.m_eff / (2.0 * constants::q_e);

  // node velocity = mean adjacent branch current / (q n_s W)
  auto node_vel = [&](int node, const int br[2], double grads[2], double& dvn,
                      double& dvg) {
    double isum = 0.0;
    int cnt = 0;
    for (int t = 0; t < 2; ++t)
      if (br[t] >= 0) {
        isum += x[nv_ + br[t]];
        ++cnt;
      }
    const double w = 1.0 / cnt;
    const double ns = uccm_density(p, vg, volt(x, node));
    const double den = constants::q_e * p.width * ns;
    const double v = isum * w / den;
    for (int t = 0; t < 2; ++t) grads[t] = br[t] >= 0 ? w / den : 0.0;
    const double rel = uccm_density_dvg(p, vg, volt(x, node)) / ns;
    dvn = v * rel;   // density falls as the node voltage rises
    dvg = -v * rel;
    return v;
  };
  double gs[2], gd[2], dvs_dn, dvs_dg, dvd_dn, dvd_dg;
  const double vs = node_vel(e.kin_s, e.kin_s_br, gs, dvs_dn, dvs_dg);
  const double vd = node_vel(e.kin_d, e.kin_d_br, gd, dvd_dn, dvd_dg);
  kv.k = c * (vd * vd - vs * vs);
  kv.dk_dvs = -2.0 * c * vs * dvs_dn;
  kv.dk_dvd = 2.0 * c * vd * dvd_dn;
  kv.dk_dvg = 2.0 * c * (vd * dvd_dg - vs * dvs_dg);
  kv.dk_di[0] = -2.0 * c * vs * gs[0];
  kv.dk_di[1] = -2.0 * c * vs * gs[1];
  kv.dk_di[2] = 2.0 * c * vd * gd[0];
  kv.dk_di[3] = 2.0 * c * vd * gd[1];
  return kv;
}

namespace {

struct StampCtx {
  Eigen::MatrixXd* J;
  Eigen::VectorXd* F;
  int nv;

  void f_node(int node, double val) const {
    if (node > 0) (*F)[node - 1] += val;
  }
  void j_vv(int row_node, int col_node, double val) const {
    if (row_node > 0 && col_node > 0) (*J)(row_node - 1, col_node - 1) += val;
  }
  void j_vb(int row_node, int branch, double val) const {
    if (row_node > 0) (*J)(row_node - 1, nv + branch) += val;
  }
  void f_branch(int branch, double val) const { (*F)[nv + branch] += val; }
  void j_bv(int branch, int col_node, double val) const {
    if (col_node > 0) (*J)(nv + branch, col_node - 1) += val;
  }
  void j_bb(int branch, int col_branch, double val) const {
    (*J)(nv + branch, nv + col_branch) += val;
  }
};

} // namespace

void MnaSystem::assemble_dc(const Eigen::VectorXd& x, double src_scale,
                            Eigen::MatrixXd& J, Eigen::VectorXd& F) const {
  J.setZero();
  F.setZero();
  StampCtx ctx{&J, &F, nv_};
  const DeviceParams& p = ckt_.params;

  for (const Element& e : ckt_.elements) {
    switch (e.kind) {
      case ElementKind::resistor: {
        const double g = 1.0 / e.value;
        const double i = g * (volt(x, e.p) - volt(x, e.n));
        ctx.f_node(e.p, i);
        ctx.f_node(e.n, -i);
        ctx.j_vv(e.p, e.p, g);
        ctx.j_vv(e.p, e.n, -g);
        ctx.j_vv(e.n, e.p, -g);
        ctx.j_vv(e.n, e.n, g);
        break;
      }
      case ElementKind::channel: {
        const double vg = volt(x, e.gate);
        const double vsv = volt(x, e.n);
        const double vdv = volt(x, e.p);
        const double i = channel_current(p, vg, vsv, vdv, e.seg_len);
        const double gd = segment_conductance(p, vg, vsv, vdv, e.seg_len);
        const double gs = segment_conductance(p, vg, vdv, vsv, e.seg_len);
        ctx.f_node(e.p, i);
        ctx.f_node(e.n, -i);
        ctx.j_vv(e.p, e.p, gd);
        ctx.j_vv(e.p, e.n, -gs);
        ctx.j_vv(e.p, e.gate, gs - gd);
        ctx.j_vv(e.n, e.p, -gd);
        ctx.j_vv(e.n, e.n, gs);
        ctx.j_vv(e.n, e.gate, -(gs - gd));
        break;
      }
      case ElementKind::nonlinear_charge:
      case ElementKind::linear_capacitor:
        break; // open at DC
      case ElementKind::drude_inductor: {
        const double ib = x[nv_ + e.branch];
        ctx.f_node(e.p, ib);
        ctx.f_node(e.n, -ib);
        ctx.j_vb(e.p, e.branch, 1.0);
        ctx.j_vb(e.n, e.branch, -1.0);
        // short at DC
        ctx.f_branch(e.branch, volt(x, e.p) - volt(x, e.n));
        ctx.j_bv(e.branch, e.p, 1.0);
        ctx.j_bv(e.branch, e.n, -1.0);
        break;
      }
      case ElementKind::voltage_source:
      case ElementKind::current_probe: {
        const double ib = x[nv_ + e.branch];
        ctx.f_node(e.p, ib);
        ctx.f_node(e.n, -ib);
        ctx.j_vb(e.p, e.branch, 1.0);
        ctx.j_vb(e.n, e.branch, -1.0);
        const double target =
            e.kind == ElementKind::voltage_source ? src_scale * e.value : 0.0;
        ctx.f_branch(e.branch, volt(x, e.p) - volt(x, e.n) - target);
        ctx.j_bv(e.branch, e.p, 1.0);
        ctx.j_bv(e.branch, e.n, -1.0);
        break;
      }
    }
  }
}

void MnaSystem::assemble_step(const Eigen::VectorXd& x, double t_new, double dt,
                              const SolverConfig& cfg, Eigen::MatrixXd& J,
                              Eigen::VectorXd& F) const {
  J.setZero();
  F.setZero();
  StampCtx ctx{&J, &F, nv_};
  const DeviceParams& p = ckt_.params;
  const bool trap = cfg.integrator == Integrator::trapezoidal;
  const double coef = (trap ? 2.0 : 1.0) / dt;

  for (std::size_t k = 0; k < ckt_.elements.size(); ++k) {
    const Element& e = ckt_.elements[k];
    const ElemState& s = st_[k];
    switch (e.kind) {
      case ElementKind::resistor: {
        const double g = 1.0 / e.value;
        const double i = g * (volt(x, e.p) - volt(x, e.n));
        ctx.f_node(e.p, i);
        ctx.f_node(e.n, -i);
        ctx.j_vv(e.p, e.p, g);
        ctx.j_vv(e.p, e.n, -g);
        ctx.j_vv(e.n, e.p, -g);
        ctx.j_vv(e.n, e.n, g);
        break;
      }
      case ElementKind::channel: {
        const double vg = volt(x, e.gate);
        const double vsv = volt(x, e.n);
        const double vdv = volt(x, e.p);
        const double i = channel_current(p, vg, vsv, vdv, e.seg_len);
        const double gd = segment_conductance(p, vg, vsv, vdv, e.seg_len);
        const double gs = segment_conductance(p, vg, vdv, vsv, e.seg_len);
        ctx.f_node(e.p, i);
        ctx.f_node(e.n, -i);
        ctx.j_vv(e.p, e.p, gd);
        ctx.j_vv(e.p, e.n, -gs);
        ctx.j_vv(e.p, e.gate, gs - gd);
        ctx.j_vv(e.n, e.p, -gd);
        ctx.j_vv(e.n, e.n, gs);
        ctx.j_vv(e.n, e.gate, -(gs - gd));
        break;
      }
      case ElementKind::nonlinear_charge:
      case ElementKind::linear_capacitor: {
        double q, cap;
        if (e.kind == ElementKind::nonlinear_charge) {
          q = segment_charge(p, volt(x, e.p), volt(x, e.n), e.seg_len);
          cap = segment_capacitance(p, volt(x, e.p), volt(x, e.n), e.seg_len);
        } else {
          q = e.value * (volt(x, e.p) - volt(x, e.n));
          cap = e.value;
        }
        const double i = coef * (q - s.q) - (trap ? s.i : 0.0);
        const double geq = coef * cap;
        ctx.f_node(e.p, i);
        ctx.f_node(e.n, -i);
        ctx.j_vv(e.p, e.p, geq);
        ctx.j_vv(e.p, e.n, -geq);
        ctx.j_vv(e.n, e.p, -geq);
        ctx.j_vv(e.n, e.n, geq);
        break;
      }
      case ElementKind::drude_inductor: {
        const double ib = x[nv_ + e.branch];
        const DrudeEval ev = eval_drude(e, x);
        const KineticEval kv = eval_kinetic(e, x);
        ctx.f_node(e.p, ib);
        ctx.f_node(e.n, -ib);
        ctx.j_vb(e.p, e.branch, 1.0);
        ctx.j_vb(e.n, e.branch, -1.0);
        // inductive part of the branch voltage, net of the convective drop
        const double vpn = volt(x, e.p) - volt(x, e.n) - kv.k;
        if (cfg.inductor_law == InductorLaw::flux) {
          // v_L = d(L i)/dt discretized on the flux
          const double flux = ev.l * ib;
          double r = vpn - coef * (flux - s.flux);
          if (trap) r += s.v;
          ctx.f_branch(e.branch, r);
          ctx.j_bv(e.branch, e.p, 1.0);
          ctx.j_bv(e.branch, e.n, -1.0);
          ctx.j_bv(e.branch, e.gate, -coef * ib * ev.dl_dvg - kv.dk_dvg);
          ctx.j_bv(e.branch, e.ctrl_s, -coef * ib * ev.dl_dvs);
          ctx.j_bv(e.branch, e.ctrl_d, -coef * ib * ev.dl_dvd);
          ctx.j_bv(e.branch, e.kin_s, -kv.dk_dvs);
          ctx.j_bv(e.branch, e.kin_d, -kv.dk_dvd);
          ctx.j_bb(e.branch, e.branch, -coef * ev.l);
          for (int t = 0; t < 2; ++t) {
            if (e.kin_s_br[t] >= 0)
              ctx.j_bb(e.branch, e.kin_s_br[t], -kv.dk_di[t]);
            if (e.kin_d_br[t] >= 0)
              ctx.j_bb(e.branch, e.kin_d_br[t], -kv.dk_di[2 + t]);
          }
        } else {
          // v_L = L di/dt
          const double dcoef = trap ? 0.5 * dt : dt;
          double r = (ib - s.i) - dcoef * vpn / ev.l;
          if (trap) r -= 0.5 * dt * s.v / s.ind;
          ctx.f_branch(e.branch, r);
          ctx.j_bb(e.branch, e.branch, 1.0);
          const double gl = dcoef / ev.l;
          ctx.j_bv(e.branch, e.p, -gl);
          ctx.j_bv(e.branch, e.n, gl);
          const double common = dcoef * vpn / (ev.l * ev.l);
          ctx.j_bv(e.branch, e.gate, common * ev.dl_dvg + gl * kv.dk_dvg);
          ctx.j_bv(e.branch, e.ctrl_s, common * ev.dl_dvs);
          ctx.j_bv(e.branch, e.ctrl_d, common * ev.dl_dvd);
          ctx.j_bv(e.branch, e.kin_s, gl * kv.dk_dvs);
          ctx.j_bv(e.branch, e.kin_d, gl * kv.dk_dvd);
          for (int t = 0; t < 2; ++t) {
            if (e.kin_s_br[t] >= 0)
              ctx.j_bb(e.branch, e.kin_s_br[t], gl * kv.dk_di[t]);
            if (e.kin_d_br[t] >= 0)
              ctx.j_bb(e.branch, e.kin_d_br[t], gl * kv.dk_di[2 + t]);
          }
        }
        break;
      }
      case ElementKind::voltage_source:
      case ElementKind::current_probe: {
        const double ib = x[nv_ + e.branch];
        ctx.f_node(e.p, ib);
        ctx.f_node(e.n, -ib);
        ctx.j_vb(e.p, e.branch, 1.0);
        ctx.j_vb(e.n, e.branch, -1.0);
        double target = 0.0;
        if (e.kind == ElementKind::voltage_source)
          target = e.value + e.amp * std::cos(e.omega * t_new);
        ctx.f_branch(e.branch, volt(x, e.p) - volt(x, e.n) - target);
        ctx.j_bv(e.branch, e.p, 1.0);
        ctx.j_bv(e.branch, e.n, -1.0);
        break;
      }
    }
  }
}

void MnaSystem::init_state(const Eigen::VectorXd& x_dc) {
  const DeviceParams& p = ckt_.params;
  for (std::size_t k = 0; k < ckt_.elements.size(); ++k) {
    const Element& e = ckt_.elements[k];
    ElemState& s = st_[k];
    s = ElemState{};
    switch (e.kind) {
      case ElementKind::nonlinear_charge:
        s.q = segment_charge(p, volt(x_dc, e.p), volt(x_dc, e.n), e.seg_len);
        break;
      case ElementKind::linear_capacitor:
        s.q = e.value * (volt(x_dc, e.p) - volt(x_dc, e.n));
        break;
      case ElementKind::drude_inductor: {
        const DrudeEval ev = eval_drude(e, x_dc);
        s.ind = ev.l;
        s.i = x_dc[nv_ + e.branch];
        s.flux = ev.l * s.i;
        s.v = 0.0;
        break;
      }
      default:
        break;
    }
  }
}

void MnaSystem::commit_step(const Eigen::VectorXd& x, double dt,
                            const SolverConfig& cfg) {
  const DeviceParams& p = ckt_.params;
  const bool trap = cfg.integrator == Integrator::trapezoidal;
  const double coef = (trap ? 2.0 : 1.0) / dt;
  for (std::size_t k = 0; k < ckt_.elements.size(); ++k) {
    const Element& e = ckt_.elements[k];
    ElemState& s = st_[k];
    switch (e.kind) {
      case ElementKind::nonlinear_charge:
      case ElementKind::linear_capacitor: {
        const double q =
            e.kind == ElementKind::nonlinear_charge
                ? segment_charge(p, volt(x, e.p), volt(x, e.n), e.seg_len)
                : e.value * (volt(x, e.p) - volt(x, e.n));
        const double i = coef * (q - s.q) - (trap ? s.i : 0.0);
        s.q = q;
        s.i = i;
        break;
      }
      case ElementKind::drude_inductor: {
        const DrudeEval ev = eval_drude(e, x);
        const KineticEval kv = eval_kinetic(e, x);
        s.ind = ev.l;
        s.i = x[nv_ + e.branch];
        s.flux = ev.l * s.i;
        s.v = volt(x, e.p) - volt(x, e.n) - kv.k;
        break;
      }
      default:
        break;
    }
  }
}

bool MnaSystem::branch_row_is_voltage(int branch,
                                      const SolverConfig& cfg) const {
  for (const Element& e : ckt_.elements) {
    if (e.branch != branch) continue;
    if (e.kind == ElementKind::drude_inductor)
      return cfg.inductor_law == InductorLaw::flux;
    return true; // sources and probes
  }
  return true;
}

namespace {

struct NewtonReport {
  bool ok = false;
  int iters = 0;
  double kcl_residual = 0.0;
  std::string why;
};

template <typename AssembleFn>
NewtonReport newton_solve(AssembleFn&& assemble, Eigen::VectorXd& x, int nv,
                          int nb, const SolverConfig& cfg,
                          const std::vector<bool>& branch_row_volts) {
  const int n = nv + nb;
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd F(n);
  NewtonReport rep;
  bool step_small = true;
  for (int it = 0; it <= cfg.newton_max_iter; ++it) {
    assemble(x, J, F);
    double f_i = 0.0, f_v = 0.0;
    for (int r = 0; r < nv; ++r) f_i = std::max(f_i, std::fabs(F[r]));
    for (int b = 0; b < nb; ++b) {
      const double a = std::fabs(F[nv + b]);
      if (branch_row_volts[b])
        f_v = std::max(f_v, a);
      else
        f_i = std::max(f_i, a);
    }
    rep.kcl_residual = f_i;
    rep.iters = it;
    if (f_i < cfg.newton_tol_i && f_v < cfg.newton_tol_v && step_small) {
      rep.ok = true;
      return rep;
    }
    if (it == cfg.newton_max_iter) break;
    Eigen::VectorXd dx = J.partialPivLu().solve(-F);
    if (!dx.allFinite()) {
      rep.why = "non-finite Newton update (singular Jacobian?)";
      return rep;
    }
    x += dx;
    double dv = 0.0, di = 0.0;
    for (int r = 0; r < nv; ++r) dv = std::max(dv, std::fabs(dx[r]));
    for (int b = 0; b < nb; ++b) di = std::max(di, std::fabs(dx[nv + b]));
    step_small = dv < cfg.newton_tol_v && di < cfg.newton_tol_i;
  }
  rep.why = "iteration limit";
  return rep;
}

} // namespace

Eigen::VectorXd dc_operating_point(const SegmentedCircuit& c,
                                   const SolverConfig& cfg) {
  cfg.validate();
  MnaSystem sys(c);
  const int nv = sys.n_voltage_unknowns();
  const int nb = c.n_branches;
  const std::vector<bool> volts(nb, true); // DC branch rows are all volt-type
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.n_unknowns());

  auto attempt = [&](double scale) {
    return newton_solve(
        [&](const Eigen::VectorXd& xx, Eigen::MatrixXd& J, Eigen::VectorXd& F) {
          sys.assemble_dc(xx, scale, J, F);
        },
        x, nv, nb, cfg, volts);
  };

  NewtonReport rep = attempt(1.0);
  if (rep.ok) return x;

  // Source stepping: ramp all sources in 10 steps.
  x.setZero();
  for (int k = 1; k <= 10; ++k) {
    const double scale = k / 10.0;
    rep = attempt(scale);
    if (!rep.ok) {
      std::ostringstream os;
      os << "dc_operating_point: no convergence at source scale " << scale
         << " after " << rep.iters << " iterations (KCL residual "
         << rep.kcl_residual << " A" << (rep.why.empty() ? "" : ", " + rep.why)
         << ")";
      throw NonConvergence(os.str());
    }
  }
  return x;
}

WaveformSet transient(const SegmentedCircuit& c, const SolverConfig& cfg) {
  cfg.validate();
  if (c.exc.frequency <= 0.0)
    throw std::invalid_argument("transient: excitation frequency must be > 0");

  const Eigen::VectorXd x_dc = dc_operating_point(c, cfg);
  MnaSystem sys(c);
  sys.init_state(x_dc);

  const int nv = sys.n_voltage_unknowns();
  const int nb = c.n_branches;
  std::vector<bool> volts(nb);
  for (int b = 0; b < nb; ++b) volts[b] = sys.branch_row_is_voltage(b, cfg);

  const int S = cfg.steps_per_cycle;
  const double dt = 1.0 / (c.exc.frequency * S);
  const int retain = cfg.min_cycles;
  const int cap = retain * S + 1;

  WaveformSet w;
  w.steps_per_cycle = S;
  w.dt = dt;
  w.baseline_observe = node_voltage(c, x_dc, c.observe);

  Eigen::MatrixXd vring(c.n_nodes, cap);
  Eigen::MatrixXd iring(std::max(nb, 1), cap);
  long total = 0;
  auto push_sample = [&](const Eigen::VectorXd& x) {
    const int col = static_cast<int>(total % cap);
    vring(0, col) = 0.0;
    for (int nnode = 1; nnode < c.n_nodes; ++nnode)
      vring(nnode, col) = x[nnode - 1];
    for (int b = 0; b < nb; ++b) iring(b, col) = x[nv + b];
    ++total;
  };

  Eigen::VectorXd x = x_dc;
  push_sample(x);

  int quiet = 0;
  bool settled = false;
  int cycles = 0;
  for (int k = 0; k < cfg.max_cycles && !settled; ++k) {
    double avg = 0.0;
    for (int j = 1; j <= S; ++j) {
      const double t_new = (static_cast<double>(k) * S + j) * dt;
      NewtonReport rep = newton_solve(
          [&](const Eigen::VectorXd& xx, Eigen::MatrixXd& J,
              Eigen::VectorXd& F) { sys.assemble_step(xx, t_new, dt, cfg, J, F); },
          x, nv, nb, cfg, volts);
      if (!rep.ok) {
        std::ostringstream os;
        os << "transient: no convergence at t=" << t_new << " s (cycle " << k
           << ", step " << j << "), KCL residual " << rep.kcl_residual << " A";
        throw NonConvergence(os.str());
      }
      w.max_kcl_residual = std::max(w.max_kcl_residual, rep.kcl_residual);
      sys.commit_step(x, dt, cfg);
      push_sample(x);
      avg += node_voltage(c, x, c.observe) / S;
    }
    w.cycle_averages.push_back(avg);
    cycles = k + 1;
    if (k >= 1) {
      const double prev = w.cycle_averages[k - 1];
      const double drift = std::fabs(avg - prev);
      if (drift <= std::max(cfg.settle_tol * std::fabs(avg), 1e-12))
        ++quiet;
      else
        quiet = 0;
      if (quiet >= cfg.settle_quiet_cycles && cycles >= cfg.min_cycles)
        settled = true;
    }
  }
  w.settled = settled;
  w.cycles_run = cycles;

  const int n_ret = std::min(cycles, retain);
  const int n_samples = n_ret * S + 1;
  w.time.resize(n_samples);
  w.voltages.resize(c.n_nodes, n_samples);
  w.currents.resize(nb, n_samples);
  const long first = total - n_samples;
  for (int j = 0; j < n_samples; ++j) {
    const int col = static_cast<int>((first + j) % cap);
    w.time[j] = static_cast<double>(first + j) * dt;
    w.voltages.col(j) = vring.col(col);
    for (int b = 0; b < nb; ++b) w.currents(b, j) = iring(b, col);
  }
  return w;
}

DcResponse extract_dc_response(const WaveformSet& w, double baseline,
                               double settle_tol) {
  if (w.cycle_averages.size() < 4)
    throw std::invalid_argument("extract_dc_response: need at least 4 cycles");
  const std::size_t n = w.cycle_averages.size();
  double mean = 0.0;
  for (std::size_t k = n - 4; k < n; ++k) mean += w.cycle_averages[k] / 4.0;
  DcResponse r;
  r.delta_u = mean - baseline;
  double spread = 0.0;
  for (std::size_t a = n - 4; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      spread = std::max(spread,
                        std::fabs(w.cycle_averages[a] - w.cycle_averages[b]));
  r.flagged = spread > settle_tol * std::fabs(r.delta_u);
  return r;
}

ChannelProfile extract_profiles(const WaveformSet& w,
                                const SegmentedCircuit& c) {
  const int S = w.steps_per_cycle;
  const int n_samples = static_cast<int>(w.time.size());
  if (n_samples < S + 1)
    throw std::invalid_argument("extract_profiles: waveform shorter than one cycle");
  const int first = n_samples - (S + 1);
  const int n = c.params.n_segments;
  const double seg_len = c.segment_length();

  ChannelProfile prof;
  prof.positions.resize(n);
  prof.times.assign(w.time.begin() + first, w.time.end());
  prof.velocity.assign(n, std::vector<double>(S + 1));
  prof.density.assign(n, std::vector<double>(S + 1));
  for (int i = 0; i < n; ++i) {
    prof.positions[i] = (i + 0.5) * seg_len;
    const int branch = c.elements[c.seg_inductor_elem[i]].branch;
    for (int j = 0; j <= S; ++j) {
      const int col = first + j;
      const double vg = w.voltages(c.gate, col);
      const double vmid =
          0.5 * (w.voltages(c.seg_s[i], col) + w.voltages(c.seg_d[i], col));
      const double ns = uccm_density(c.params, vg, vmid);
      prof.density[i][j] = ns;
      prof.velocity[i][j] = w.currents(branch, col) /
                            (constants::q_e * ns * c.params.width);
    }
  }
  return prof;
}

std::vector<IvPoint> iv_sweep(const DeviceParams& params,
                              const std::vector<double>& vgs_grid,
                              const std::vector<double>& vds_grid,
                              const SolverConfig& cfg) {
  auto monotone = [](const std::vector<double>& g) {
    for (std::size_t i = 1; i < g.size(); ++i)
      if (g[i] <= g[i - 1]) return false;
    return true;
  };
  if (!monotone(vgs_grid) || !monotone(vds_grid))
    throw std::invalid_argument("iv_sweep: grids must be strictly increasing");

  std::vector<IvPoint> table;
  table.reserve(vgs_grid.size() * vds_grid.size());
  for (double vgs : vgs_grid) {
    for (double vds : vds_grid) {
      BiasPoint bias{vgs, vds};
      Excitation exc;
      exc.amplitude = 0.0;
      BoundaryCondition bc;
      bc.mode = BoundaryMode::voltage_drive;
      SegmentedCircuit ckt = build_segmented(params, bias, exc, bc,
                                             InductanceMode::varying);
      try {
        const Eigen::VectorXd x = dc_operating_point(ckt, cfg);
        const int probe_branch = ckt.elements[ckt.drive_probe_elem].branch;
        const double i_probe = x[ckt.n_nodes - 1 + probe_branch];
        table.push_back({vgs, vds, -i_probe});
      } catch (const NonConvergence& e) {
        std::ostringstream os;
        os << e.what() << " [grid point V_gs=" << vgs << " V, V_ds=" << vds
           << " V]";
        throw NonConvergence(os.str());
      }
    }
  }
  return table;
}

} // namespace terafet
