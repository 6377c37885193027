#include "terafet/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace terafet {

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary); // binary: UNIX newlines everywhere
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace

void emit_csv(const ResponseCurve& curve, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "frequency_hz,delta_u_v,method,flag\n";
  const std::string m = method_name(curve.method);
  for (const ResponsePoint& pt : curve.points)
    os << format_g9(pt.frequency) << "," << format_g9(pt.delta_u) << "," << m
       << "," << pt.flag << "\n";
  if (!os) throw std::runtime_error("write failed: " + path);
}

void emit_csv(const ChannelProfile& prof, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "x_m,t_s,v_mps,n_per_m2\n";
  for (std::size_t i = 0; i < prof.positions.size(); ++i)
    for (std::size_t j = 0; j < prof.times.size(); ++j)
      os << format_g9(prof.positions[i]) << "," << format_g9(prof.times[j])
         << "," << format_g9(prof.velocity[i][j]) << ","
         << format_g9(prof.density[i][j]) << "\n";
  if (!os) throw std::runtime_error("write failed: " + path);
}

void emit_csv(const std::vector<IvPoint>& table, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "v_gs,v_ds,i_d\n";
  for (const IvPoint& p : table)
    os << format_g9(p.v_gs) << "," << format_g9(p.v_ds) << ","
       << format_g9(p.i_d) << "\n";
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_sidecar(const std::string& artifact_path, const std::string& scenario,
                   const std::string& method, const std::string& config_hash) {
  nlohmann::json meta;
  meta["artifact"] = artifact_path.substr(artifact_path.find_last_of('/') + 1);
  meta["scenario"] = scenario;
  meta["method"] = method;
  meta["config_hash"] = config_hash;
  std::ofstream os = open_out(artifact_path + ".meta.json");
  os << meta.dump(2) << "\n";
  if (!os) throw std::runtime_error("write failed: " + artifact_path + ".meta.json");
}

ResponseCurve read_response_csv(const std::string& path) {
  std::ifstream is = open_in(path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty response csv: " + path);
  ResponseCurve curve;
  bool have_method = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 4)
      throw std::runtime_error("malformed response csv row in " + path);
    ResponsePoint pt;
    pt.frequency = std::stod(cols[0]);
    pt.delta_u = std::stod(cols[1]);
    pt.flag = cols[3];
    pt.ok = pt.flag.rfind("error", 0) != 0;
    if (!have_method) {
      curve.method = method_from_name(cols[2]);
      have_method = true;
    }
    curve.points.push_back(pt);
  }
  return curve;
}

std::vector<IvPoint> read_iv_csv(const std::string& path) {
  std::ifstream is = open_in(path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty iv csv: " + path);
  std::vector<IvPoint> table;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 3)
      throw std::runtime_error("malformed iv csv row in " + path);
    table.push_back({std::stod(cols[0]), std::stod(cols[1]), std::stod(cols[2])});
  }
  return table;
}

} // namespace terafet
