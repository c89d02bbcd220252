#ifndef SLGRAPH_IO_HPP
#define SLGRAPH_IO_HPP

#include <Eigen/Dense>

#include <cstdio>
#include <string>
#include <vector>

#include "slgraph/bracketing.hpp"
#include "slgraph/graph.hpp"
#include "slgraph/krein.hpp"
#include "slgraph/oracle.hpp"
#include "slgraph/spectrum.hpp"

namespace slg {

/// Parses the JSON graph-specification format (see docs/graph-format.md).
/// Throws ValidationError on malformed input, std::runtime_error on I/O.
MetricGraph parse_graph(const std::string& json_text);
MetricGraph load_graph(const std::string& path);

/// Fixed-format float: 17 significant digits, byte-stable across runs.
std::string format_double(double v);

/// Minimal insertion-ordered JSON writer; all numbers go through
/// format_double so reports diff cleanly.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(const std::string& key = "");
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& field(const std::string& k, double v) { return key(k).value(v); }
  JsonWriter& field(const std::string& k, int v) { return key(k).value(v); }
  JsonWriter& field(const std::string& k, bool v) { return key(k).value(v); }
  JsonWriter& field(const std::string& k, const std::string& v) { return key(k).value(v); }
  std::string str() const { return out_; }

 private:
  void comma();
  std::string out_;
  std::vector<bool> first_;  // per nesting level
  bool pending_key_ = false;
};

void write_text_file(const std::string& path, const std::string& content);

// Report writers. Column layouts are part of the CLI contract.
std::string csv_spectrum(const SpectrumResult& s);                       // branch_index,lambda
std::string csv_eigenfunction(const std::vector<EdgeSamples>& samples);  // edge_id,x,value
std::string csv_bracket(const BracketReport& r);                         // n,lambda_N,lambda,lambda_D,pass
std::string csv_asymptotics(const AsymptoticFit& f);                     // n,sqrt_lambda,model
std::string csv_gram(const KreinReport& r);                              // N,min_eig,max_eig
std::string csv_roots(const RootScan& r);                                // index,lambda
std::string json_krein(const KreinReport& r);
std::string json_bracket(const BracketReport& r);
std::string json_asymptotics(const AsymptoticFit& f);

/// Matrix dump, one entry per line "i j value" (0-based, symmetric entries
/// duplicated).
std::string dump_matrix(const Eigen::MatrixXd& m);

}  // namespace slg

#endif
