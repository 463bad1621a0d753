#include "psrsel/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "psrsel/errors.hpp"

namespace psrsel {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << content;
  if (!out) throw ConfigError(path + ": write failed");
}

void append_matrix(std::string& out, const std::string& name,
                   const Eigen::MatrixXd& m) {
  out += "matrix " + name + " " + std::to_string(m.rows()) + " " +
         std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
}

namespace {

void append_row_matrix(std::string& out, const std::string& name,
                       const RowMatrix& m) {
  append_matrix(out, name, Eigen::MatrixXd(m));
}

void append_vector(std::string& out, const std::string& name,
                   const Eigen::VectorXd& v) {
  append_matrix(out, name, Eigen::MatrixXd(v.transpose()));
}

}  // namespace

std::string dump_pomdp(const Pomdp& model) {
  std::string out = "pomdp v1\n";
  out += "states " + std::to_string(model.num_states()) + " actions " +
         std::to_string(model.num_actions()) + " obs " +
         std::to_string(model.num_obs()) + "\n";
  for (int a = 0; a < model.num_actions(); ++a)
    append_row_matrix(out, "transition_" + std::to_string(a),
                      model.transition(a));
  for (int a = 0; a < model.num_actions(); ++a)
    append_row_matrix(out, "emission_" + std::to_string(a),
                      model.emission(a));
  append_vector(out, "initial_belief", model.initial_belief());
  return out;
}

namespace {

class TokenReader {
 public:
  explicit TokenReader(const std::string& text) : in_(text) {}

  std::string word(const std::string& context) {
    std::string w;
    if (!(in_ >> w))
      throw ConfigError("parse_pomdp: unexpected end of input, wanted " +
                        context);
    return w;
  }

  void expect(const std::string& want) {
    const std::string got = word("'" + want + "'");
    if (got != want)
      throw ConfigError("parse_pomdp: expected '" + want + "', got '" + got +
                        "'");
  }

  long long integer(const std::string& context) {
    const std::string w = word(context);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("parse_pomdp: expected integer for " + context +
                        ", got '" + w + "'");
    }
  }

  double real(const std::string& context) {
    const std::string w = word(context);
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("parse_pomdp: expected number for " + context +
                        ", got '" + w + "'");
    }
  }

 private:
  std::istringstream in_;
};

RowMatrix read_matrix(TokenReader& r, const std::string& name, int rows,
                      int cols) {
  r.expect("matrix");
  r.expect(name);
  const long long got_rows = r.integer(name + " rows");
  const long long got_cols = r.integer(name + " cols");
  if (got_rows != rows || got_cols != cols)
    throw ConfigError("parse_pomdp: " + name + " has shape " +
                      std::to_string(got_rows) + "x" +
                      std::to_string(got_cols) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  RowMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = r.real(name + " entry");
  return m;
}

}  // namespace

Pomdp parse_pomdp(const std::string& text) {
  TokenReader r(text);
  r.expect("pomdp");
  r.expect("v1");
  r.expect("states");
  const int n = static_cast<int>(r.integer("states"));
  r.expect("actions");
  const int num_a = static_cast<int>(r.integer("actions"));
  r.expect("obs");
  const int num_o = static_cast<int>(r.integer("obs"));
  if (n < 1 || num_a < 1 || num_o < 1)
    throw ConfigError("parse_pomdp: sizes must be positive");
  std::vector<RowMatrix> trans, emis;
  for (int a = 0; a < num_a; ++a)
    trans.push_back(read_matrix(r, "transition_" + std::to_string(a), n, n));
  for (int a = 0; a < num_a; ++a)
    emis.push_back(read_matrix(r, "emission_" + std::to_string(a), n, num_o));
  const RowMatrix belief_row = read_matrix(r, "initial_belief", 1, n);
  Eigen::VectorXd b0 = belief_row.row(0).transpose();
  return Pomdp(std::move(trans), std::move(emis), std::move(b0));
}

std::string dump_hankel(const HankelEstimates& est) {
  std::string out = "hankel v1\n";
  out += "tests " + std::to_string(est.basis.tests.size()) + "\n";
  for (const Sequence& t : est.basis.tests) out += t.to_string() + "\n";
  out += "histories " + std::to_string(est.basis.histories.size()) + "\n";
  for (const Sequence& h : est.basis.histories) out += h.to_string() + "\n";
  append_vector(out, "p_h", est.p_h);
  append_matrix(out, "p_th", est.p_th);
  for (const auto& [ao, mat] : est.p_t_ao_h)
    append_matrix(out,
                  "p_t_a" + std::to_string(ao.first) + "o" +
                      std::to_string(ao.second) + "_h",
                  mat);
  out += "zero_test_factors " + std::to_string(est.zero_test_factors) + "\n";
  return out;
}

std::string dump_psr(const PsrModel& model) {
  std::string out = "psr v1\n";
  out += "rank " + std::to_string(model.rank) + "\n";
  out += "requested_rank " + std::to_string(model.requested_rank) + "\n";
  out += "tests " + std::to_string(model.basis.tests.size()) + "\n";
  for (const Sequence& t : model.basis.tests) out += t.to_string() + "\n";
  out += "histories " + std::to_string(model.basis.histories.size()) + "\n";
  for (const Sequence& h : model.basis.histories) out += h.to_string() + "\n";
  append_vector(out, "b_star", model.b_star);
  append_vector(out, "b_inf", model.b_inf);
  append_matrix(out, "U", model.U);
  for (const auto& [ao, mat] : model.B_ao)
    append_matrix(out,
                  "B_a" + std::to_string(ao.first) + "o" +
                      std::to_string(ao.second),
                  mat);
  return out;
}

std::string dump_mdp(const ClusteredMdp& mdp) {
  std::string out = "clustered_mdp v1\n";
  out += "states " + std::to_string(mdp.num_states) + "\n";
  for (const auto& [ao, mat] : mdp.transitions) {
    const std::string tag =
        "a" + std::to_string(ao.first) + "o" + std::to_string(ao.second);
    append_matrix(out, "T_" + tag, mat);
    out += "support_" + tag;
    const auto it = mdp.row_support.find(ao);
    if (it != mdp.row_support.end())
      for (const int row : it->second) out += " " + std::to_string(row);
    out += "\n";
  }
  return out;
}

std::string trace_csv(const SelectionTrace& trace) {
  std::string out = "round,iteration,objective,accepted,basis_hash\n";
  out += "0,0," + format_double(trace.initial_objective) + ",0," +
         std::to_string(trace.initial_hash) + "\n";
  for (const SelectionRecord& r : trace.records) {
    out += std::to_string(r.round) + "," + std::to_string(r.iteration) + "," +
           format_double(r.objective) + "," + (r.accepted ? "1" : "0") + "," +
           std::to_string(r.basis_hash) + "\n";
  }
  return out;
}

}  // namespace psrsel
