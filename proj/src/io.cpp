#include "darwinscope/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "darwinscope/partitions.hpp"

namespace darwinscope {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

std::string format_complex(Complex z) {
  return format_double(z.real()) + " " + format_double(z.imag());
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  fail(ErrorCode::ParseError,
       path + ":" + std::to_string(line) + ": " + what);
}

// Content lines with their 1-based line numbers; comments and blanks skipped.
struct Lines {
  std::string path;
  std::vector<std::pair<int, std::string>> rows;
  size_t next = 0;

  bool done() const { return next >= rows.size(); }
  const std::pair<int, std::string>& take(const std::string& expect) {
    if (done())
      fail(ErrorCode::ParseError, path + ": unexpected end of file, expected " +
                                      expect);
    return rows[next++];
  }
};

Lines read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, path + ": cannot open file");
  Lines lines;
  lines.path = path;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    size_t start = raw.find_first_not_of(" \t\r");
    if (start == std::string::npos || raw[start] == '#') continue;
    size_t end = raw.find_last_not_of(" \t\r");
    lines.rows.emplace_back(number, raw.substr(start, end - start + 1));
  }
  return lines;
}

// "key: rest" split; errors when the line does not carry the key
std::string expect_header(Lines& lines, const std::string& key) {
  auto [number, text] = lines.take("'" + key + ":'");
  if (text.rfind(key + ":", 0) != 0)
    parse_fail(lines.path, number, "expected '" + key + ":' header");
  return text.substr(key.size() + 1);
}

std::vector<int> parse_ints(const std::string& text, const std::string& path,
                            int line) {
  std::istringstream in(text);
  std::vector<int> out;
  int v;
  while (in >> v) out.push_back(v);
  std::string tail;
  if (in.clear(), in >> tail)
    parse_fail(path, line, "unexpected token '" + tail + "'");
  if (out.empty()) parse_fail(path, line, "expected at least one integer");
  return out;
}

std::vector<double> parse_doubles(const std::string& text,
                                  const std::string& path, int line) {
  std::istringstream in(text);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  std::string tail;
  if (in.clear(), in >> tail)
    parse_fail(path, line, "unexpected token '" + tail + "'");
  return out;
}

void write_comment(std::ofstream& out, const std::string& comment) {
  if (comment.empty()) return;
  std::istringstream in(comment);
  std::string piece;
  while (std::getline(in, piece)) out << "# " << piece << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, path + ": cannot open for writing");
  return out;
}

}  // namespace

StateFileResult read_state_file(const std::string& path) {
  Lines lines = read_lines(path);
  auto dims_line = lines.rows.empty() ? 0 : lines.rows[0].first;
  std::vector<int> dims = parse_ints(expect_header(lines, "dims"), path, dims_line);
  SystemLayout layout;
  try {
    layout = SystemLayout(dims);
  } catch (const Error& e) {
    parse_fail(path, dims_line, e.what());
  }

  VectorXcd amps(layout.total_dim());
  for (int i = 0; i < layout.total_dim(); ++i) {
    auto [number, text] = lines.take("amplitude line");
    std::vector<double> parts = parse_doubles(text, path, number);
    if (parts.size() != 2)
      parse_fail(path, number, "expected 're im' amplitude pair");
    amps[i] = Complex(parts[0], parts[1]);
  }
  if (!lines.done())
    parse_fail(path, lines.rows[lines.next].first,
               "trailing content after the amplitude list");

  StateFileResult result;
  double norm = amps.norm();
  result.norm_deviation = std::abs(norm - 1.0);
  if (result.norm_deviation > 1e-6)
    fail(ErrorCode::ParseError,
         path + ": state vector norm " + format_double(norm) +
             " deviates from 1 by more than 1e-6");
  if (result.norm_deviation > default_policy().normalization_tol) {
    amps /= norm;
    result.renormalized = true;
  }
  result.state = PureState(layout, std::move(amps));
  return result;
}

void write_state_file(const std::string& path, const PureState& state,
                      const std::string& comment) {
  std::ofstream out = open_out(path);
  write_comment(out, comment);
  out << "dims:";
  for (int d : state.layout.dims()) out << " " << d;
  out << "\n";
  for (int i = 0; i < state.amplitudes.size(); ++i)
    out << format_complex(state.amplitudes[i]) << "\n";
  if (!out) fail(ErrorCode::ParseError, path + ": write failed");
}

std::pair<SystemLayout, SemiGHZDecomposition> read_decomposition_file(
    const std::string& path) {
  Lines lines = read_lines(path);
  auto header_line = [&]() {
    return lines.done() ? 0 : lines.rows[lines.next].first;
  };

  int dims_line = header_line();
  std::vector<int> dims = parse_ints(expect_header(lines, "dims"), path, dims_line);
  SystemLayout layout;
  try {
    layout = SystemLayout(dims);
  } catch (const Error& e) {
    parse_fail(path, dims_line, e.what());
  }

  int part_line = header_line();
  std::string part_text = expect_header(lines, "partition");
  Partition partition;
  try {
    partition = parse_partition(part_text, layout.size());
  } catch (const Error& e) {
    parse_fail(path, part_line, e.what());
  }

  int count_line = header_line();
  std::vector<int> counts =
      parse_ints(expect_header(lines, "branches"), path, count_line);
  if (counts.size() != 1 || counts[0] < 1)
    parse_fail(path, count_line, "expected a positive branch count");
  int branches = counts[0];

  int ortho_line = header_line();
  std::vector<int> ortho =
      parse_ints(expect_header(lines, "orthonormal"), path, ortho_line);
  if (ortho.size() != 1 || (ortho[0] != 0 && ortho[0] != 1))
    parse_fail(path, ortho_line, "expected 0 or 1");

  SemiGHZDecomposition dec;
  dec.partition = partition;
  dec.orthonormal = ortho[0] == 1;
  for (int i = 0; i < branches; ++i) {
    auto [number, text] = lines.take("'coeff' line");
    std::istringstream in(text);
    std::string tag;
    double re, im_;
    if (!(in >> tag >> re >> im_) || tag != "coeff")
      parse_fail(path, number, "expected 'coeff re im'");
    std::string tail;
    if (in >> tail) parse_fail(path, number, "unexpected token '" + tail + "'");
    dec.coefficients.emplace_back(re, im_);

    std::vector<VectorXcd> vectors;
    for (int j = 0; j < partition.size(); ++j) {
      auto [vnumber, vtext] = lines.take("'fraction' line");
      std::istringstream vin(vtext);
      std::string vtag;
      int id;
      char colon;
      if (!(vin >> vtag >> id >> colon) || vtag != "fraction" || colon != ':' ||
          id != j + 1)
        parse_fail(path, vnumber,
                   "expected 'fraction " + std::to_string(j + 1) + ":'");
      std::string rest;
      std::getline(vin, rest);
      std::vector<double> parts = parse_doubles(rest, path, vnumber);
      int dim = layout.subset_dim(partition.fractions[j]);
      if (static_cast<int>(parts.size()) != 2 * dim)
        parse_fail(path, vnumber,
                   "expected " + std::to_string(2 * dim) + " values");
      VectorXcd v(dim);
      for (int k = 0; k < dim; ++k) v[k] = Complex(parts[2 * k], parts[2 * k + 1]);
      vectors.push_back(std::move(v));
    }
    dec.branch_vectors.push_back(std::move(vectors));
  }
  if (!lines.done())
    parse_fail(path, lines.rows[lines.next].first,
               "trailing content after the last branch");
  return {layout, dec};
}

void write_decomposition_file(const std::string& path,
                              const SystemLayout& layout,
                              const SemiGHZDecomposition& dec,
                              const std::string& comment) {
  std::ofstream out = open_out(path);
  write_comment(out, comment);
  out << "dims:";
  for (int d : layout.dims()) out << " " << d;
  out << "\n";
  out << "partition: " << format_partition(dec.partition) << "\n";
  out << "branches: " << dec.branch_count() << "\n";
  out << "orthonormal: " << (dec.orthonormal ? 1 : 0) << "\n";
  for (int i = 0; i < dec.branch_count(); ++i) {
    out << "coeff " << format_complex(dec.coefficients[i]) << "\n";
    for (int j = 0; j < dec.partition.size(); ++j) {
      out << "fraction " << j + 1 << ":";
      const VectorXcd& v = dec.branch_vectors[i][j];
      for (int k = 0; k < v.size(); ++k) out << " " << format_complex(v[k]);
      out << "\n";
    }
  }
  if (!out) fail(ErrorCode::ParseError, path + ": write failed");
}

std::pair<SystemLayout, HermitianObservable> read_observable_file(
    const std::string& path) {
  Lines lines = read_lines(path);
  auto header_line = [&]() {
    return lines.done() ? 0 : lines.rows[lines.next].first;
  };

  int dims_line = header_line();
  std::vector<int> dims = parse_ints(expect_header(lines, "dims"), path, dims_line);
  SystemLayout layout;
  try {
    layout = SystemLayout(dims);
  } catch (const Error& e) {
    parse_fail(path, dims_line, e.what());
  }

  int sys_line = header_line();
  std::vector<int> systems =
      parse_ints(expect_header(lines, "systems"), path, sys_line);
  int dim = 0;
  try {
    layout.check_subset(systems);
    dim = layout.subset_dim(systems);
  } catch (const Error& e) {
    parse_fail(path, sys_line, e.what());
  }

  VectorXd values(dim);
  MatrixXcd vectors(dim, dim);
  for (int c = 0; c < dim; ++c) {
    auto [number, text] = lines.take("'eig' line");
    std::istringstream in(text);
    std::string tag;
    if (!(in >> tag) || tag != "eig")
      parse_fail(path, number, "expected 'eig value re im ...'");
    std::string rest;
    std::getline(in, rest);
    std::vector<double> parts = parse_doubles(rest, path, number);
    if (static_cast<int>(parts.size()) != 1 + 2 * dim)
      parse_fail(path, number,
                 "expected " + std::to_string(1 + 2 * dim) + " values");
    values[c] = parts[0];
    for (int k = 0; k < dim; ++k)
      vectors(k, c) = Complex(parts[1 + 2 * k], parts[2 + 2 * k]);
  }
  if (!lines.done())
    parse_fail(path, lines.rows[lines.next].first,
               "trailing content after the eigenpair list");

  try {
    return {layout, HermitianObservable(systems, values, vectors)};
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void write_observable_file(const std::string& path, const SystemLayout& layout,
                           const HermitianObservable& obs,
                           const std::string& comment) {
  std::ofstream out = open_out(path);
  write_comment(out, comment);
  out << "dims:";
  for (int d : layout.dims()) out << " " << d;
  out << "\n";
  out << "systems:";
  for (int s : obs.systems) out << " " << s;
  out << "\n";
  for (int c = 0; c < obs.eigenvectors.cols(); ++c) {
    out << "eig " << format_double(obs.eigenvalues[c]);
    for (int k = 0; k < obs.eigenvectors.rows(); ++k)
      out << " " << format_complex(obs.eigenvectors(k, c));
    out << "\n";
  }
  if (!out) fail(ErrorCode::ParseError, path + ": write failed");
}

}  // namespace darwinscope
