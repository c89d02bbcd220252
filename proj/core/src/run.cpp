#include "slgraph/run.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "slgraph/io.hpp"
#include "slgraph/linalg.hpp"

namespace slg {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

int default_grid(const MetricGraph& g, double lo, double hi) {
  const int k = std::max(1, g.edge_count());
  const double spacing =
      std::min(0.25, std::pow(std::numbers::pi / k, 2) / 4.0);
  return std::max(64, static_cast<int>(std::ceil((hi - lo) / spacing)));
}

std::vector<int> gram_truncations(int max_truncation, int available) {
  std::vector<int> t;
  for (int n = 5; n <= max_truncation; n += 5) {
    if (n <= available) t.push_back(n);
  }
  if (t.empty() && available >= 1) t.push_back(std::min(available, max_truncation));
  return t;
}

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured
  double threshold = 0.0;  // gate
};

class VerifySuite {
 public:
  explicit VerifySuite(std::ostream& out) : out_(out) {}

  void add(const std::string& name, bool pass, double value, double threshold) {
    checks_.push_back({name, pass, value, threshold});
    out_ << (pass ? "[PASS] " : "[FAIL] ") << name << "  (value " << format_double(value)
         << ", gate " << format_double(threshold) << ")\n";
  }
  /// gate <=: pass when value <= threshold.
  void gate(const std::string& name, double value, double threshold) {
    add(name, value <= threshold, value, threshold);
  }
  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(),
                       [](const Check& c) { return c.pass; });
  }
  std::string to_json() const {
    JsonWriter w;
    w.begin_object().field("all_pass", all_pass());
    w.begin_array("checks");
    for (const Check& c : checks_) {
      w.begin_object()
          .field("name", c.name)
          .field("pass", c.pass)
          .field("value", c.value)
          .field("threshold", c.threshold)
          .end_object();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
  }

 private:
  std::ostream& out_;
  std::vector<Check> checks_;
};

void write_spectrum_outputs(const RunConfig& c, const DiscreteForm& d,
                            const SpectrumResult& s, std::ostream& out) {
  write_text_file(join_path(c.out_dir, "spectrum.csv"), csv_spectrum(s));
  auto dump_fn = [&](int index, const std::string& name) {
    write_text_file(join_path(c.out_dir, name),
                    csv_eigenfunction(eigenfunction_values(s, d, index)));
  };
  for (int k = 1; k <= std::min(3, s.positive_count()); ++k)
    dump_fn(k, "eigenfunction_p" + std::to_string(k) + ".csv");
  for (int k = 1; k <= std::min(3, s.negative_count()); ++k)
    dump_fn(-k, "eigenfunction_m" + std::to_string(k) + ".csv");
  if (c.dump_matrices) {
    write_text_file(join_path(c.out_dir, "form.txt"), dump_matrix(d.form));
    write_text_file(join_path(c.out_dir, "signed_mass.txt"), dump_matrix(d.signed_mass));
    write_text_file(join_path(c.out_dir, "unsigned_mass.txt"),
                    dump_matrix(d.unsigned_mass));
  }
  out << "spectrum: " << s.positive_count() << " positive, " << s.negative_count()
      << " negative eigenvalues on " << s.reduced_dimension << " dofs\n";
  if (s.positive_count() > 0)
    out << "  lambda_1 = " << format_double(s.positive[0].lambda) << "\n";
}

void require_positivity_gate(const DiscreteForm& d) {
  const PositivityReport rep = check_positivity(d, false);
  if (!rep.positive) throw HypothesisError(rep.message);
}

int run_verify_all(const RunConfig& c, const MetricGraph& g, std::ostream& out) {
  VerifySuite suite(out);

  const DiscreteForm d = assemble_global(g);
  const PositivityReport pos = check_positivity(d, true);
  if (!pos.positive) throw HypothesisError(pos.message);
  out << "positivity: rho_1 = " << format_double(pos.rho1) << "\n";

  auto rel_asym = [](const Eigen::MatrixXd& m) {
    const double norm = std::max(m.norm(), 1e-300);
    return (m - m.transpose()).norm() / norm;
  };
  suite.gate("assembly: form symmetric", rel_asym(d.form), 1e-13);
  suite.gate("assembly: signed mass symmetric", rel_asym(d.signed_mass), 1e-13);
  suite.gate("assembly: unsigned mass symmetric", rel_asym(d.unsigned_mass), 1e-13);

  const SpectrumResult s = solve_pencil(d);
  suite.add("spectrum: eigenbasis complete",
            s.positive_count() + s.negative_count() == s.reduced_dimension,
            s.positive_count() + s.negative_count(), s.reduced_dimension);

  const int r = d.dof_count;
  Eigen::MatrixXd y(r, r);
  Eigen::VectorXd lam(r);
  int col = 0;
  for (const EigenPair& p : s.positive) {
    y.col(col) = p.vec;
    lam(col++) = p.lambda;
  }
  for (const EigenPair& p : s.negative) {
    y.col(col) = p.vec;
    lam(col++) = p.lambda;
  }

  const Eigen::MatrixXd gram_f = y.transpose() * d.form * y;
  suite.gate("spectrum: F-orthonormality",
             (gram_f - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-10);

  const Eigen::MatrixXd gram_b = y.transpose() * d.signed_mass * y;
  double offdiag = 0.0, diag_identity = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (i != j) offdiag = std::max(offdiag, std::abs(gram_b(i, j)));
    }
    diag_identity = std::max(diag_identity, std::abs(1.0 - lam(i) * gram_b(i, i)));
  }
  suite.gate("spectrum: B-orthogonality off-diagonal", offdiag, 1e-10);
  suite.gate("spectrum: F(y,y) = lambda [y,y]", diag_identity, 1e-9);

  double resid = 0.0;
  const double fnorm = d.form.norm(), bnorm = d.signed_mass.norm();
  for (int i = 0; i < r; ++i) {
    const double rn = (d.form * y.col(i) - lam(i) * (d.signed_mass * y.col(i))).norm();
    resid = std::max(resid, rn / (fnorm + std::abs(lam(i)) * bnorm));
  }
  suite.gate("spectrum: pencil residual", resid, 1e-9);

  bool cone_ok = true;
  try {
    classify_cone(s, d);
  } catch (const InvariantError&) {
    cone_ok = false;
  }
  suite.add("krein: cone theorem (sign([y,y]) = sign(lambda))", cone_ok, cone_ok ? 0 : 1, 0);

  const Eigen::MatrixXd smat = build_S(d);
  const Eigen::MatrixXd fs = d.form * smat;
  suite.gate("krein: S self-adjoint in F", (fs - fs.transpose()).norm() / fs.norm(), 1e-12);
  {
    // Cross-check of the two code paths: eigenvalues of the explicit S versus
    // 1/lambda from the pencil solve, through the general (nonsymmetric) QR.
    Eigen::EigenSolver<Eigen::MatrixXd> es(smat);
    std::vector<double> mu_s;
    double max_imag = 0.0;
    for (int i = 0; i < r; ++i) {
      max_imag = std::max(max_imag, std::abs(es.eigenvalues()(i).imag()));
      mu_s.push_back(es.eigenvalues()(i).real());
    }
    std::vector<double> mu_p;
    for (int i = 0; i < r; ++i) mu_p.push_back(1.0 / lam(i));
    std::sort(mu_s.begin(), mu_s.end());
    std::sort(mu_p.begin(), mu_p.end());
    double gap = max_imag;
    for (int i = 0; i < r; ++i) gap = std::max(gap, std::abs(mu_s[i] - mu_p[i]));
    suite.gate("krein: eig(S) = 1/lambda cross-check", gap, 1e-10);
  }

  const Projections pr = spectral_projections(d, s);
  suite.gate("krein: P+ + P- = I",
             (pr.p_plus + pr.p_minus - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(),
             1e-12);
  suite.gate("krein: P+ idempotent",
             (pr.p_plus * pr.p_plus - pr.p_plus).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd fp = d.form * pr.p_plus;
  suite.gate("krein: P+ F-self-adjoint", (fp - fp.transpose()).norm() / std::max(fp.norm(), 1e-300),
             1e-12);
  suite.gate("krein: [P+u, P-v] = 0",
             (pr.p_plus.transpose() * d.signed_mass * pr.p_minus).cwiseAbs().maxCoeff(),
             1e-10);
  {
    Eigen::SparseMatrix<double> qsum = pr.q_plus + pr.q_minus;
    Eigen::SparseMatrix<double> id(d.full_dim, d.full_dim);
    id.setIdentity();
    suite.gate("krein: Q+ + Q- = I on edge coordinates",
               (Eigen::MatrixXd(qsum) - Eigen::MatrixXd(id)).cwiseAbs().maxCoeff(), 0.0);
    suite.gate("krein: Q+ Q- = 0",
               Eigen::MatrixXd(pr.q_plus * pr.q_minus).cwiseAbs().maxCoeff(), 0.0);
  }

  const KreinReport kr = krein_analyze(d, s, c.probes, c.seed,
                                       gram_truncations(c.truncation, s.positive_count()));
  if (s.positive_count() > 0) {
    const double sn = s_norm(s.positive[0].vec, d, s);
    suite.gate("krein: ||y_1||_S = 1/sqrt(lambda_1)",
               std::abs(sn - 1.0 / std::sqrt(s.positive[0].lambda)), 1e-10);
  }
  suite.add("krein: |S| positive definite (S-norm lower bound > 0)",
            kr.s_ratio_lower > 0.0, kr.s_ratio_lower, 0.0);
  const double vw_max =
      kr.vw_residuals.empty()
          ? 0.0
          : *std::max_element(kr.vw_residuals.begin(), kr.vw_residuals.end());
  suite.gate("krein: V/W norm identity residual", vw_max, 1e-8);
  suite.gate("krein: V* = P+Q+ + P-Q- adjoint identity", vw_adjoint_residual(d, s), 1e-10);
  double maxmin_gap = 0.0;
  for (const auto& [n, gap] : kr.maxmin_gaps) maxmin_gap = std::max(maxmin_gap, gap);
  suite.gate("krein: max-min d_{n+1} = lambda_{n+1}", maxmin_gap, 1e-8);
  if (!kr.gram_spectra.empty()) {
    const double first = kr.gram_spectra.front().min_eig;
    double worst = first;
    for (const auto& ge : kr.gram_spectra) worst = std::min(worst, ge.min_eig);
    suite.add("krein: half-range Gram floor non-degenerating", worst >= 0.5 * first && first > 0.0,
              worst, 0.5 * first);
  }

  const BracketReport br = verify_bracketing(g, s, c.tol_bracket, c.nond_sign);
  bool bracket_ok = true;
  for (const BracketRow& row : br.rows) {
    if (row.verified && !row.pass) bracket_ok = false;
  }
  suite.add("bracketing: lambda_N <= lambda <= lambda_D (verified rows)", bracket_ok,
            bracket_ok ? 0 : 1, 0);
  if (!br.nd_violations.empty()) {
    out << "note: decoupled non-Dirichlet problem not positive definite on edges:";
    for (const EdgeId& e : br.nd_violations) out << " " << e;
    out << " (rows reported unverified)\n";
  }

  {
    const RootScan scan =
        scan_roots(g, c.window_lo, c.window_hi, default_grid(g, c.window_lo, c.window_hi));
    for (const std::string& wmsg : scan.warnings) out << "oracle warning: " << wmsg << "\n";
    std::vector<double> fem;
    for (const EigenPair& p : s.positive) {
      if (p.lambda > c.window_lo && p.lambda < c.window_hi) fem.push_back(p.lambda);
    }
    for (const EigenPair& p : s.negative) {
      if (p.lambda > c.window_lo && p.lambda < c.window_hi) fem.push_back(p.lambda);
    }
    suite.add("oracle: root count = FEM eigenvalue count in window",
              scan.roots.size() == fem.size(), static_cast<double>(fem.size()),
              static_cast<double>(scan.roots.size()));
    int max_mesh_h_inv = 0;
    for (const Edge& e : g.edges) max_mesh_h_inv = std::max(max_mesh_h_inv, e.mesh);
    int min_mesh = max_mesh_h_inv;
    for (const Edge& e : g.edges) min_mesh = std::min(min_mesh, e.mesh);
    const double gate = 1e-2 * std::pow(64.0 / min_mesh, 2);
    double worst = 0.0;
    for (double lambda : fem) {
      double best = std::numeric_limits<double>::infinity();
      for (double root : scan.roots)
        best = std::min(best, std::abs(lambda - root) / std::max(1.0, std::abs(root)));
      worst = std::max(worst, best);
    }
    suite.gate("oracle: FEM eigenvalues match oracle roots", worst, gate);
  }

  write_text_file(join_path(c.out_dir, "verify.json"), suite.to_json());
  return suite.all_pass() ? kExitOk : kExitInvariant;
}

int dispatch(const RunConfig& c, std::ostream& out) {
  MetricGraph g = load_graph(c.input);
  if (c.mesh_override > 0) {
    if (c.mesh_override < 2) throw ValidationError("mesh override must be >= 2");
    g = g.with_mesh(c.mesh_override);
  }
  require_valid(g);
  if (c.window_set && !(c.window_lo < c.window_hi))
    throw ValidationError("empty lambda window");
  fs::create_directories(c.out_dir);

  switch (c.command) {
    case Command::Spectrum: {
      const DiscreteForm d = assemble_global(g);
      require_positivity_gate(d);
      const SpectrumResult s = solve_pencil(d);
      write_spectrum_outputs(c, d, s, out);
      return kExitOk;
    }
    case Command::Krein: {
      const DiscreteForm d = assemble_global(g);
      require_positivity_gate(d);
      const SpectrumResult s = solve_pencil(d);
      const KreinReport kr = krein_analyze(
          d, s, c.probes, c.seed, gram_truncations(c.truncation, s.positive_count()));
      write_text_file(join_path(c.out_dir, "krein.json"), json_krein(kr));
      write_text_file(join_path(c.out_dir, "gram.csv"), csv_gram(kr));
      out << "krein: " << kr.cone_table.size() << " eigenpairs classified, "
          << kr.vw_residuals.size() << " probes\n";
      return kExitOk;
    }
    case Command::Bracket: {
      const DiscreteForm d = assemble_global(g);
      require_positivity_gate(d);
      const SpectrumResult s = solve_pencil(d);
      const BracketReport br = verify_bracketing(g, s, c.tol_bracket, c.nond_sign);
      write_text_file(join_path(c.out_dir, "bracket.csv"), csv_bracket(br));
      write_text_file(join_path(c.out_dir, "bracket.json"), json_bracket(br));
      bool ok = true;
      for (const BracketRow& row : br.rows) {
        if (row.verified && !row.pass) ok = false;
      }
      out << "bracketing: " << br.rows.size() << " rows, "
          << (ok ? "all verified rows pass" : "failures present") << "\n";
      return ok ? kExitOk : kExitInvariant;
    }
    case Command::Asymptotics: {
      const DiscreteForm d = assemble_global(g);
      require_positivity_gate(d);
      const SpectrumResult s = solve_pencil(d);
      const AsymptoticFit fit = asymptotic_fit(s, g, c.fit_lo, c.fit_hi);
      write_text_file(join_path(c.out_dir, "asymptotics.json"), json_asymptotics(fit));
      write_text_file(join_path(c.out_dir, "asymptotics.csv"), csv_asymptotics(fit));
      out << "asymptotics: slope " << format_double(fit.slope) << " vs target "
          << format_double(fit.target) << "\n";
      return kExitOk;
    }
    case Command::Oracle: {
      const RootScan scan = scan_roots(g, c.window_lo, c.window_hi,
                                       default_grid(g, c.window_lo, c.window_hi));
      write_text_file(join_path(c.out_dir, "oracle.csv"), csv_roots(scan));
      for (const std::string& w : scan.warnings) out << "warning: " << w << "\n";
      out << "oracle: " << scan.roots.size() << " roots in ["
          << format_double(c.window_lo) << ", " << format_double(c.window_hi) << "]\n";
      return kExitOk;
    }
    case Command::VerifyAll:
      return run_verify_all(c, g, out);
  }
  throw std::runtime_error("unknown command");
}

void write_error(std::ostream& err, const std::string& category, const std::string& what,
                 int code) {
  JsonWriter w;
  w.begin_object()
      .field("error", category)
      .field("message", what)
      .field("exit_code", code)
      .end_object();
  err << w.str() << "\n";
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(config, out);
  } catch (const ValidationError& e) {
    write_error(err, "validation", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const HypothesisError& e) {
    write_error(err, "hypothesis", e.what(), kExitHypothesis);
    return kExitHypothesis;
  } catch (const InvariantError& e) {
    write_error(err, "invariant", e.what(), kExitInvariant);
    return kExitInvariant;
  } catch (const std::exception& e) {
    write_error(err, "io", e.what(), kExitIo);
    return kExitIo;
  }
}

}  // namespace slg
