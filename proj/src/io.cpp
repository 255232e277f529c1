#include "optomech/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace optomech {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json to_json(const DensityMatrix& rho) {
  const int d = rho.dim();
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < d; ++i) {
    json rr = json::array();
    json ri = json::array();
    for (int k = 0; k < d; ++k) {
      rr.push_back(rho(i, k).real());
      ri.push_back(rho(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"dim", d}, {"re", std::move(re)}, {"im", std::move(im)}};
}

DensityMatrix density_matrix_from_json(const json& j) {
  const int d = j.at("dim").get<int>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d) {
    throw DimensionError("density matrix JSON: row count does not match dim");
  }
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(re[i].size()) != d || static_cast<int>(im[i].size()) != d) {
      throw DimensionError("density matrix JSON: column count does not match dim");
    }
    for (int k = 0; k < d; ++k) m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return DensityMatrix(std::move(m));
}

json to_json(const GridSpec& s) {
  return json{{"x_min", s.x_min}, {"x_max", s.x_max}, {"p_min", s.p_min},
              {"p_max", s.p_max}, {"nx", s.nx},       {"np", s.np}};
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec s;
  s.x_min = j.at("x_min").get<double>();
  s.x_max = j.at("x_max").get<double>();
  s.p_min = j.at("p_min").get<double>();
  s.p_max = j.at("p_max").get<double>();
  s.nx = j.at("nx").get<int>();
  s.np = j.at("np").get<int>();
  return s;
}

void write_csv(std::ostream& os, const WignerGrid& grid) {
  const GridSpec& s = grid.spec();
  os << "x,p,W\n";
  for (int i = 0; i < s.nx; ++i)
    for (int j = 0; j < s.np; ++j)
      os << format_number(s.x(i)) << ',' << format_number(s.p(j)) << ',' << format_number(grid(i, j)) << '\n';
}

void write_binary(const std::filesystem::path& stem, const WignerGrid& grid) {
  const GridSpec& s = grid.spec();
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path meta = stem;
  meta += ".json";
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw Error("cannot open " + bin.string());
    for (int i = 0; i < s.nx; ++i) {
      for (int j = 0; j < s.np; ++j) {
        const double v = grid(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
    }
  }
  json sidecar = to_json(s);
  sidecar["schema_version"] = 1;
  sidecar["dtype"] = "float64";
  sidecar["layout"] = "row-major";
  sidecar["rows"] = "x";
  sidecar["cols"] = "p";
  sidecar["data"] = bin.filename().string();
  std::ofstream out(meta);
  if (!out) throw Error("cannot open " + meta.string());
  out << sidecar.dump(2) << '\n';
}

WignerGrid read_binary(const std::filesystem::path& stem) {
  std::filesystem::path meta = stem;
  meta += ".json";
  std::ifstream mi(meta);
  if (!mi) throw Error("cannot open " + meta.string());
  const json sidecar = json::parse(mi);
  const GridSpec s = grid_spec_from_json(sidecar);
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw Error("cannot open " + bin.string());
  RealMatrix values(s.nx, s.np);
  for (int i = 0; i < s.nx; ++i) {
    for (int j = 0; j < s.np; ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      values(i, j) = v;
    }
  }
  if (!in) throw Error("truncated Wigner dump " + bin.string());
  return WignerGrid(s, std::move(values));
}

}  // namespace optomech
