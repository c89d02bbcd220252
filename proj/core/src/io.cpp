#include "slgraph/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace slg {

namespace {

using nlohmann::json;

std::string id_of(const json& j, const char* what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ValidationError(std::string("graph file: ") + what + " id must be a string or integer");
}

EndpointRef parse_endpoint_key(const std::string& key) {
  const auto pos = key.rfind(':');
  if (pos == std::string::npos || pos + 2 != key.size() ||
      (key[pos + 1] != '0' && key[pos + 1] != '1'))
    throw ValidationError("graph file: endpoint key '" + key +
                          "' must look like \"<edge>:0\" or \"<edge>:1\"");
  return {key.substr(0, pos), key[pos + 1] - '0'};
}

VertexCondition parse_condition(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ValidationError("graph file: condition must be an object with a \"type\"");
  const std::string type = j["type"].get<std::string>();
  std::map<EndpointRef, double> f;
  if (j.contains("f")) {
    if (!j["f"].is_object())
      throw ValidationError("graph file: condition \"f\" must map endpoints to numbers");
    for (const auto& [key, val] : j["f"].items()) {
      if (!val.is_number())
        throw ValidationError("graph file: f value for '" + key + "' must be a number");
      f[parse_endpoint_key(key)] = val.get<double>();
    }
  }
  if (type == "dirichlet") return VertexCondition::dirichlet();
  if (type == "kirchhoff") return VertexCondition::kirchhoff();
  if (type == "robin") return VertexCondition::robin(std::move(f));
  if (type == "custom") {
    std::vector<std::vector<double>> rows;
    if (j.contains("rows")) {
      if (!j["rows"].is_array())
        throw ValidationError("graph file: custom \"rows\" must be an array of arrays");
      for (const auto& row : j["rows"]) {
        if (!row.is_array())
          throw ValidationError("graph file: custom \"rows\" must be an array of arrays");
        rows.emplace_back();
        for (const auto& v : row) {
          if (!v.is_number())
            throw ValidationError("graph file: custom row entries must be numbers");
          rows.back().push_back(v.get<double>());
        }
      }
    }
    return VertexCondition::custom(std::move(rows), std::move(f));
  }
  throw ValidationError("graph file: unknown condition type '" + type + "'");
}

}  // namespace

MetricGraph parse_graph(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("graph file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("edges") || !j["edges"].is_array() ||
      !j.contains("vertices") || !j["vertices"].is_array())
    throw ValidationError("graph file must be an object with \"edges\" and \"vertices\" arrays");

  MetricGraph g;
  for (const auto& je : j["edges"]) {
    if (!je.is_object()) throw ValidationError("graph file: edge entries must be objects");
    Edge e;
    if (!je.contains("id") || !je.contains("start") || !je.contains("end"))
      throw ValidationError("graph file: every edge needs id, start and end");
    e.id = id_of(je["id"], "edge");
    e.start = id_of(je["start"], "vertex");
    e.end = id_of(je["end"], "vertex");
    if (je.contains("weight")) {
      if (!je["weight"].is_number_integer())
        throw ValidationError("graph file: edge weight must be the integer +1 or -1");
      e.weight = je["weight"].get<int>();
    }
    if (je.contains("mesh")) {
      if (!je["mesh"].is_number_integer())
        throw ValidationError("graph file: edge mesh must be an integer");
      e.mesh = je["mesh"].get<int>();
    }
    if (je.contains("potential")) {
      const auto& jp = je["potential"];
      if (!jp.is_object() || !jp.contains("breakpoints") || !jp.contains("values"))
        throw ValidationError("graph file: potential needs breakpoints and values arrays");
      std::vector<double> bp, vals;
      for (const auto& v : jp["breakpoints"]) bp.push_back(v.get<double>());
      for (const auto& v : jp["values"]) vals.push_back(v.get<double>());
      e.potential = PiecewisePotential(std::move(bp), std::move(vals));
    }
    g.edges.push_back(std::move(e));
  }
  for (const auto& jv : j["vertices"]) {
    if (!jv.is_object() || !jv.contains("id") || !jv.contains("condition"))
      throw ValidationError("graph file: every vertex needs id and condition");
    const VertexId id = id_of(jv["id"], "vertex");
    g.vertices.push_back(id);
    g.conditions[id] = parse_condition(jv["condition"]);
  }
  return g;
}

MetricGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonWriter::comma() {
  if (!first_.empty()) {
    if (first_.back())
      first_.back() = false;
    else
      out_ += ',';
  }
}

JsonWriter& JsonWriter::begin_object() {
  if (pending_key_)
    pending_key_ = false;
  else
    comma();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& k) {
  if (!k.empty()) key(k);
  if (pending_key_)
    pending_key_ = false;
  else
    comma();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
  return *this;
}

namespace {
std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}
}  // namespace

JsonWriter& JsonWriter::key(const std::string& k) {
  comma();
  out_ += '"' + escape(k) + "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  if (pending_key_)
    pending_key_ = false;
  else
    comma();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  if (pending_key_)
    pending_key_ = false;
  else
    comma();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  if (pending_key_)
    pending_key_ = false;
  else
    comma();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  if (pending_key_)
    pending_key_ = false;
  else
    comma();
  out_ += '"' + escape(v) + '"';
  return *this;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string csv_spectrum(const SpectrumResult& s) {
  std::string out = "branch_index,lambda\n";
  for (const EigenPair& p : s.positive)
    out += std::to_string(p.index) + "," + format_double(p.lambda) + "\n";
  for (const EigenPair& p : s.negative)
    out += std::to_string(p.index) + "," + format_double(p.lambda) + "\n";
  return out;
}

std::string csv_eigenfunction(const std::vector<EdgeSamples>& samples) {
  std::string out = "edge_id,x,value\n";
  for (const EdgeSamples& es : samples) {
    for (std::size_t i = 0; i < es.x.size(); ++i)
      out += es.edge + "," + format_double(es.x[i]) + "," + format_double(es.value[i]) + "\n";
  }
  return out;
}

std::string csv_bracket(const BracketReport& r) {
  std::string out = "n,lambda_N,lambda,lambda_D,pass\n";
  for (const BracketRow& row : r.rows) {
    out += std::to_string(row.n) + "," + format_double(row.lambda_N) + "," +
           format_double(row.lambda) + "," + format_double(row.lambda_D) + "," +
           (row.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string csv_asymptotics(const AsymptoticFit& f) {
  std::string out = "n,sqrt_lambda,model\n";
  for (int n = f.n_lo; n <= f.n_hi; ++n) {
    out += std::to_string(n) + "," + format_double(f.sqrt_lambda[n - f.n_lo]) + "," +
           format_double(f.slope * n + f.intercept) + "\n";
  }
  return out;
}

std::string csv_gram(const KreinReport& r) {
  std::string out = "N,min_eig,max_eig\n";
  for (const auto& g : r.gram_spectra) {
    out += std::to_string(g.truncation) + "," + format_double(g.min_eig) + "," +
           format_double(g.max_eig) + "\n";
  }
  return out;
}

std::string csv_roots(const RootScan& r) {
  std::string out = "index,lambda\n";
  for (std::size_t i = 0; i < r.roots.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(r.roots[i]) + "\n";
  return out;
}

std::string json_krein(const KreinReport& r) {
  JsonWriter w;
  w.begin_object();
  w.begin_array("cone_table");
  for (const ConeEntry& e : r.cone_table) {
    w.begin_object()
        .field("index", e.index)
        .field("bracket", e.bracket)
        .field("cone", std::string(1, e.cone))
        .end_object();
  }
  w.end_array();
  w.key("s_norm_constants").begin_object()
      .field("probe_min_ratio", r.s_ratio_min)
      .field("probe_max_ratio", r.s_ratio_max)
      .field("extremal_lower", r.s_ratio_lower)
      .field("extremal_upper", r.s_ratio_upper)
      .end_object();
  w.begin_array("vw_residuals");
  for (double v : r.vw_residuals) w.value(v);
  w.end_array();
  w.begin_array("maxmin_gaps");
  for (const auto& [n, gap] : r.maxmin_gaps)
    w.begin_object().field("n", n).field("gap", gap).end_object();
  w.end_array();
  w.begin_array("gram_spectra");
  for (const auto& g : r.gram_spectra) {
    w.begin_object()
        .field("N", g.truncation)
        .field("min_eig", g.min_eig)
        .field("max_eig", g.max_eig)
        .end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

std::string json_bracket(const BracketReport& r) {
  JsonWriter w;
  w.begin_object()
      .field("tol_lower", r.tol_lower)
      .field("tol_upper", r.tol_upper)
      .field("truncated", r.truncated)
      .field("all_pass", r.all_pass());
  w.begin_array("nd_hypothesis_violations");
  for (const EdgeId& e : r.nd_violations) w.value(e);
  w.end_array();
  w.begin_array("rows");
  for (const BracketRow& row : r.rows) {
    w.begin_object()
        .field("n", row.n)
        .field("lambda_N", row.lambda_N)
        .field("lambda", row.lambda)
        .field("lambda_D", row.lambda_D)
        .field("pass", row.pass)
        .field("verified", row.verified)
        .field("slack_lower", row.slack_lower)
        .field("slack_upper", row.slack_upper)
        .end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

std::string json_asymptotics(const AsymptoticFit& f) {
  JsonWriter w;
  w.begin_object()
      .field("slope", f.slope)
      .field("intercept", f.intercept)
      .field("max_residual", f.max_residual)
      .field("max_remainder", f.max_remainder)
      .field("target_slope", f.target)
      .field("n_lo", f.n_lo)
      .field("n_hi", f.n_hi)
      .end_object();
  return w.str() + "\n";
}

std::string dump_matrix(const Eigen::MatrixXd& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0)
        out += std::to_string(i) + " " + std::to_string(j) + " " +
               format_double(m(i, j)) + "\n";
    }
  }
  return out;
}

}  // namespace slg
