#include "epsim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace epsim {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string snapshot_text(const HydroState& state, const ElectricField& field,
                          const GasModel& model, const Grid1D& grid, long step,
                          const std::string& scenario) {
  std::string out;
  out += "# scenario = " + scenario + "\n";
  out += "# step = " + std::to_string(step) + "\n";
  out += "# time = " + format_double(state.time) + "\n";
  out += "# gamma = " + format_double(model.gamma()) + "\n";
  out += "# delta = " + format_double(model.delta()) + "\n";
  out += std::string("# pressure_law = ") + to_string(model.law()) + "\n";
  out += "# n_cells = " + std::to_string(grid.n_cells) + "\n";
  out += "# columns = x rho u m E z w\n";
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double rho = state.rho[i];
    const double m = state.mom[i];
    const auto zw = riemann_invariants(model, rho, m);
    out += format_double(grid.center(i));
    for (double v : {rho, m / rho, m, field.e_vals[i], zw.z, zw.w}) {
      out += ' ';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

double parse_number(const std::string& text, const std::string& origin) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw IoError(origin + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

Snapshot parse_snapshot(const std::string& text, const std::string& origin) {
  Snapshot snap;
  bool have_step = false, have_time = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 3);
      if (key == "step") {
        snap.step = static_cast<long>(parse_number(value, origin));
        have_step = true;
      } else if (key == "time") {
        snap.state.time = parse_number(value, origin);
        have_time = true;
      }
      continue;
    }
    std::istringstream row(line);
    std::vector<std::string> cols;
    std::string c;
    while (row >> c) cols.push_back(c);
    if (cols.size() != 7) throw IoError(origin + ": expected 7 columns");
    snap.state.rho.push_back(parse_number(cols[1], origin));
    snap.state.mom.push_back(parse_number(cols[3], origin));
  }
  if (!have_step || !have_time) throw IoError(origin + ": missing step/time header");
  return snap;
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  return parse_snapshot(read_text(path), path.string());
}

std::string monitor_csv(const RunReport& report) {
  std::string out =
      "step,time,mass,min_rho,sup_rho,sup_abs_u,sup_abs_e,field_ratio,max_z,"
      "max_w,riemann_slack\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.step);
    for (double v : {r.time, r.mass, r.min_rho, r.sup_rho, r.sup_abs_u, r.sup_abs_e,
                     r.field_ratio, r.max_z, r.max_w, r.riemann_slack}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string contraction_csv(const std::vector<ContractionRecord>& history) {
  std::string out = "n,sup_distance,ratio\n";
  for (const auto& h : history) {
    out += std::to_string(h.n) + "," + format_double(h.sup_distance) + "," +
           format_double(h.ratio) + "\n";
  }
  return out;
}

std::string convergence_csv(const std::vector<StudyRow>& rows) {
  std::string out = "tau,epsilon,delta,L1_error,dissipation_integral\n";
  for (const auto& r : rows) {
    out += format_double(r.tau) + "," + format_double(r.epsilon) + "," +
           format_double(r.delta) + "," + format_double(r.l1_error) + "," +
           format_double(r.dissipation) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace epsim
