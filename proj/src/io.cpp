#include "gridtopo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "gridtopo/errors.hpp"

namespace gridtopo {

std::string fmt_full(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw schema_error(path + ": cannot parse number '" + s + "'");
  }
}

long parse_int(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw schema_error(path + ": cannot parse integer '" + s + "'");
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw schema_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

LineList read_case(const std::string& path) {
  std::ifstream in = open_in(path);
  LineList lines;
  int declared_m = 0;
  bool saw_header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      const auto pos = line.find("buses:");
      if (pos != std::string::npos)
        declared_m = static_cast<int>(parse_int(
            line.substr(pos + 6, line.find_first_of("\r\n", pos) - pos - 6), path));
      continue;
    }
    if (!saw_header) {
      if (split_csv(line) != std::vector<std::string>{"from_bus", "to_bus", "g_line",
                                                      "b_tilde_line"})
        throw schema_error(path + ": unexpected case file header '" + line + "'");
      saw_header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 4) throw schema_error(path + ": expected 4 fields, got '" + line + "'");
    LineList::Line ln;
    ln.from = static_cast<int>(parse_int(f[0], path));
    ln.to = static_cast<int>(parse_int(f[1], path));
    ln.g_line = parse_num(f[2], path);
    ln.b_tilde_line = parse_num(f[3], path);
    lines.lines.push_back(ln);
    lines.m = std::max({lines.m, ln.from, ln.to});
  }
  if (!saw_header) throw schema_error(path + ": missing case file header");
  if (declared_m > 0) {
    if (declared_m < lines.m)
      throw schema_error(path + ": declared bus count smaller than the largest index");
    lines.m = declared_m;
  }
  return lines;
}

void write_case(const std::string& path, const LineList& lines) {
  std::ofstream out = open_out(path);
  out << "# buses: " << lines.m << "\n";
  out << "from_bus,to_bus,g_line,b_tilde_line\n";
  for (const auto& ln : lines.lines)
    out << ln.from << ',' << ln.to << ',' << fmt_full(ln.g_line) << ','
        << fmt_full(ln.b_tilde_line) << "\n";
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto f = split_csv(line);
    std::vector<double> row;
    row.reserve(f.size());
    for (const auto& s : f) row.push_back(parse_num(s, path));
    if (!rows.empty() && rows.front().size() != row.size())
      throw schema_error(path + ": ragged matrix rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw schema_error(path + ": empty matrix");
  Matrix a(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) a(i, j) = rows[i][j];
  return a;
}

void write_matrix_csv(const std::string& path, const Matrix& a) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << fmt_full(a(i, j));
    }
    out << "\n";
  }
}

MeasurementSet read_measurements(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw schema_error(path + ": empty measurement file");
  if (split_csv(line) !=
      std::vector<std::string>{"n", "bus", "p", "q", "v_re", "v_im", "v_mag", "theta"})
    throw schema_error(path + ": unexpected measurement header '" + line + "'");

  struct Row {
    int n, bus;
    std::string f[6];
  };
  std::vector<Row> rows;
  int max_n = -1, max_bus = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw schema_error(path + ": expected 8 fields, got '" + line + "'");
    Row r;
    r.n = static_cast<int>(parse_int(f[0], path));
    r.bus = static_cast<int>(parse_int(f[1], path));
    for (int k = 0; k < 6; ++k) r.f[k] = f[k + 2];
    if (r.n < 0 || r.bus < 1) throw schema_error(path + ": bad sample or bus index");
    max_n = std::max(max_n, r.n);
    max_bus = std::max(max_bus, r.bus);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw schema_error(path + ": no measurement rows");
  const int m = max_bus;
  const int n_samples = max_n + 1;
  if (static_cast<long>(rows.size()) != static_cast<long>(m) * n_samples)
    throw schema_error(path + ": incomplete sample/bus grid");

  const bool has_q = !rows.front().f[1].empty();
  const bool has_vre = !rows.front().f[2].empty();
  const bool has_vmag = !rows.front().f[4].empty();
  const bool has_theta = !rows.front().f[5].empty();

  MeasurementSet meas;
  meas.m = m;
  meas.n_samples = n_samples;
  if (has_vre)
    meas.model_kind = ModelKind::AC;
  else if (has_vmag)
    meas.model_kind = ModelKind::DLPF;
  else if (has_theta)
    meas.model_kind = ModelKind::DC;
  else
    throw schema_error(path + ": no voltage columns present");

  meas.p.assign(n_samples, Vector::Zero(m));
  if (has_q) meas.q.assign(n_samples, Vector::Zero(m));
  if (has_vre) meas.v.assign(n_samples, CVector::Zero(m));
  if (!has_vre && has_vmag) meas.v_mag.assign(n_samples, Vector::Zero(m));
  if (!has_vre && has_theta) meas.theta.assign(n_samples, Vector::Zero(m));

  for (const auto& r : rows) {
    const int i = r.bus - 1;
    auto field = [&](int k) { return parse_num(r.f[k], path); };
    meas.p[r.n](i) = field(0);
    if (has_q) {
      if (r.f[1].empty()) throw schema_error(path + ": inconsistent q column");
      meas.q[r.n](i) = field(1);
    }
    if (has_vre) {
      meas.v[r.n](i) = {field(2), field(3)};
    } else {
      if (has_vmag) meas.v_mag[r.n](i) = field(4);
      if (has_theta) meas.theta[r.n](i) = field(5);
    }
  }
  return meas;
}

void write_measurements(const std::string& path, const MeasurementSet& meas) {
  std::ofstream out = open_out(path);
  out << "n,bus,p,q,v_re,v_im,v_mag,theta\n";
  const bool ac = meas.model_kind == ModelKind::AC;
  const bool dlpf = meas.model_kind == ModelKind::DLPF;
  const bool dc = meas.model_kind == ModelKind::DC;
  for (int n = 0; n < meas.n_samples; ++n) {
    for (int i = 0; i < meas.m; ++i) {
      out << n << ',' << (i + 1) << ',' << fmt_full(meas.p[n](i)) << ',';
      if (!dc) out << fmt_full(meas.q[n](i));
      out << ',';
      if (ac) out << fmt_full(meas.v[n](i).real());
      out << ',';
      if (ac) out << fmt_full(meas.v[n](i).imag());
      out << ',';
      if (dlpf) out << fmt_full(meas.v_mag[n](i));
      out << ',';
      if (dlpf || dc) out << fmt_full(meas.theta[n](i));
      out << "\n";
    }
  }
}

}  // namespace gridtopo
