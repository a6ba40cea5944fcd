#include "coldloop/md/eam.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coldloop/common.hpp"

namespace coldloop::md {

EAMPotential::EAMPotential(Header header, double d_rho, std::vector<double> embedding, double d_r,
                           std::vector<double> density, std::vector<double> r_phi, double cutoff)
    : header_(std::move(header)),
      d_rho_(d_rho),
      d_r_(d_r),
      cutoff_(cutoff),
      embedding_(std::move(embedding)),
      density_(std::move(density)),
      r_phi_(std::move(r_phi)) {
  if (!(d_rho_ > 0.0) || !(d_r_ > 0.0)) throw Error("EAM table spacings must be positive");
  if (!(cutoff_ > 0.0)) throw Error("EAM cutoff must be positive");
  if (density_.size() != r_phi_.size()) throw Error("EAM density and pair tables differ in length");
  if (cutoff_ > d_r_ * static_cast<double>(density_.size() - 1) + 1e-9)
    throw Error("EAM cutoff lies beyond the tabulated r range");
  if (!(header_.atomic_mass > 0.0)) throw Error("EAM atomic mass must be positive");
  embedding_spline_ = UniformSpline(0.0, d_rho_, embedding_);
  density_spline_ = UniformSpline(0.0, d_r_, density_);
  r_phi_spline_ = UniformSpline(0.0, d_r_, r_phi_);
  inv_d_r_ = 1.0 / d_r_;
  const auto& cd = density_spline_.coefficients();
  const auto& cp = r_phi_spline_.coefficients();
  pair_coeffs_.resize(cd.size());
  for (std::size_t k = 0; k < cd.size(); ++k)
    pair_coeffs_[k] = {cd[k][0], cd[k][1], cd[k][2], cd[k][3], cp[k][0], cp[k][1], cp[k][2], cp[k][3]};
}

namespace {

struct Token {
  std::string_view text;
  int line;
};

class TokenStream {
 public:
  TokenStream(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    while (std::getline(in, line)) lines_.push_back(line);
  }

  const std::string& line_text(int line) {
    if (line < 1 || line > static_cast<int>(lines_.size()))
      throw ParseError(source_, line, "unexpected end of file");
    return lines_[static_cast<std::size_t>(line - 1)];
  }

  // Whitespace-split tokens of a single line.
  std::vector<std::string_view> split(int line) {
    const std::string& text = line_text(line);
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i) out.emplace_back(text.data() + i, j - i);
      i = j;
    }
    return out;
  }

  // All tokens from `first_line` to the end of file.
  std::vector<Token> tail(int first_line) {
    std::vector<Token> out;
    for (int l = first_line; l <= static_cast<int>(lines_.size()); ++l)
      for (auto t : split(l)) out.push_back({t, l});
    return out;
  }

  int line_count() const { return static_cast<int>(lines_.size()); }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::string> lines_;
};

double to_double(std::string_view t, const std::string& source, int line) {
  double v = 0.0;
  // from_chars does not accept a leading '+'; funcfl files sometimes carry one.
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ParseError(source, line, fmt::format("non-numeric token '{}'", t));
  return v;
}

int to_count(std::string_view t, const std::string& source, int line) {
  const double v = to_double(t, source, line);
  if (v != std::floor(v) || v < 2)
    throw ParseError(source, line, fmt::format("table size '{}' is not an integer >= 2", t));
  return static_cast<int>(v);
}

}  // namespace

namespace {

bool is_number(std::string_view t) {
  if (!t.empty() && (t.front() == '+' || t.front() == '-')) t.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  return ec == std::errc() && ptr == t.data() + t.size();
}

struct GridLine {
  int n_rho;
  double d_rho;
  int n_r;
  double d_r;
  double cutoff;
};

GridLine parse_grid(TokenStream& ts, int line) {
  const auto& source = ts.source();
  auto t = ts.split(line);
  if (t.size() != 5) throw ParseError(source, line, "expected 'Nrho drho Nr dr cutoff'");
  return {to_count(t[0], source, line), to_double(t[1], source, line), to_count(t[2], source, line),
          to_double(t[3], source, line), to_double(t[4], source, line)};
}

void parse_element(TokenStream& ts, int line, EAMPotential::Header& header) {
  const auto& source = ts.source();
  auto t = ts.split(line);
  if (t.size() < 3) throw ParseError(source, line, "expected 'atomic_number mass lattice_constant [lattice]'");
  header.atomic_number = static_cast<int>(to_double(t[0], source, line));
  header.atomic_mass = to_double(t[1], source, line);
  header.lattice_constant = to_double(t[2], source, line);
  if (t.size() > 3) header.lattice = std::string(t[3]);
}

bool looks_like_setfl(TokenStream& ts) {
  if (ts.line_count() < 4) return false;
  auto t = ts.split(4);
  return t.size() >= 2 && is_number(t[0]) && !is_number(t[1]);
}

}  // namespace

EAMPotential load_eam(std::istream& in, const std::string& source) {
  TokenStream ts(in, source);
  EAMPotential::Header header;
  header.comment = ts.line_text(1);

  const bool setfl = looks_like_setfl(ts);
  GridLine g{};
  int grid_line = 3, data_line = 4;
  if (setfl) {
    auto l4 = ts.split(4);
    if (to_double(l4[0], source, 4) != 1.0 || l4.size() != 2)
      throw ParseError(source, 4, "only single-element setfl files are supported");
    grid_line = 5;
    g = parse_grid(ts, 5);
    parse_element(ts, 6, header);
    data_line = 7;
  } else {
    parse_element(ts, 2, header);
    g = parse_grid(ts, 3);
  }

  const auto tokens = ts.tail(data_line);
  const std::size_t expected = static_cast<std::size_t>(g.n_rho) + 2 * static_cast<std::size_t>(g.n_r);
  if (tokens.size() < expected) {
    const int last = tokens.empty() ? ts.line_count() : tokens.back().line;
    throw ParseError(source, last,
                     fmt::format("truncated tables: header promises {} values (Nrho={}, Nr={}), found {}",
                                 expected, g.n_rho, g.n_r, tokens.size()));
  }
  if (tokens.size() > expected) {
    throw ParseError(source, tokens[expected].line,
                     fmt::format("inconsistent counts: {} values beyond the {} promised by Nrho={}, Nr={}",
                                 tokens.size() - expected, expected, g.n_rho, g.n_r));
  }

  std::size_t k = 0;
  auto take = [&](int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) {
      v = to_double(tokens[k].text, source, tokens[k].line);
      ++k;
    }
    return out;
  };
  auto embedding = take(g.n_rho);
  std::vector<double> density, r_phi;
  if (setfl) {
    density = take(g.n_r);
    r_phi = take(g.n_r);
  } else {
    auto z = take(g.n_r);
    density = take(g.n_r);
    r_phi.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) r_phi[i] = kZ2ToRPhi * z[i] * z[i];
  }

  try {
    return EAMPotential(std::move(header), g.d_rho, std::move(embedding), g.d_r, std::move(density),
                        std::move(r_phi), g.cutoff);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, grid_line, e.what());
  }
}

EAMPotential load_eam_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open potential file " + path);
  return load_eam(in, path);
}

namespace {

void dump_values(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    fmt::print(out, "{:.16e}{}", values[i], (i % 5 == 4 || i + 1 == values.size()) ? "\n" : " ");
}

}  // namespace

void write_funcfl(std::ostream& out, const EAMPotential& p) {
  const auto& h = p.header();
  const auto n_rho = p.embedding_table().size();
  const auto n_r = p.density_table().size();
  std::vector<double> z(n_r);
  for (std::size_t i = 0; i < n_r; ++i) {
    const double rp = p.r_phi_table()[i];
    if (rp < 0.0) throw Error("funcfl cannot represent an attractive pair term (r*phi < 0); use setfl");
    z[i] = std::sqrt(rp / kZ2ToRPhi);
  }
  fmt::print(out, "{}\n", h.comment);
  fmt::print(out, "{} {:.6f} {:.6f} {}\n", h.atomic_number, h.atomic_mass, h.lattice_constant, h.lattice);
  fmt::print(out, "{} {:.16e} {} {:.16e} {:.16e}\n", n_rho, p.d_rho(), n_r, p.d_r(), p.cutoff());
  dump_values(out, p.embedding_table());
  dump_values(out, z);
  dump_values(out, p.density_table());
}

void write_setfl(std::ostream& out, const EAMPotential& p, const std::string& element) {
  const auto& h = p.header();
  fmt::print(out, "{}\n", h.comment);
  fmt::print(out, "single-element setfl, units eV and A\n");
  fmt::print(out, "tables: F(rho), rho(r), r*phi(r)\n");
  fmt::print(out, "1 {}\n", element);
  fmt::print(out, "{} {:.16e} {} {:.16e} {:.16e}\n", p.embedding_table().size(), p.d_rho(), p.density_table().size(),
             p.d_r(), p.cutoff());
  fmt::print(out, "{} {:.6f} {:.6f} {}\n", h.atomic_number, h.atomic_mass, h.lattice_constant, h.lattice);
  dump_values(out, p.embedding_table());
  dump_values(out, p.density_table());
  dump_values(out, p.r_phi_table());
}

EAMPotential analytic_copper_potential(const AnalyticCopperParams& c) {
  if (!(c.taper_start < c.cutoff)) throw Error("taper must start inside the cutoff");
  auto taper = [&](double r) {
    if (r <= c.taper_start) return 1.0;
    if (r >= c.cutoff) return 0.0;
    const double x = (r - c.taper_start) / (c.cutoff - c.taper_start);
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
  };
  auto p20 = [](double x) { return std::pow(x, 20); };

  const double d_r = c.cutoff / static_cast<double>(c.n_r - 1);
  std::vector<double> density(static_cast<std::size_t>(c.n_r)), r_phi(density.size());
  for (int k = 0; k < c.n_r; ++k) {
    const double r = d_r * k;
    const double x = r / c.r_e;
    const double s = taper(r);
    const double f = c.f_e * std::exp(-c.beta * (x - 1.0)) / (1.0 + p20(x - c.lambda));
    const double phi = c.A * std::exp(-c.alpha * (x - 1.0)) / (1.0 + p20(x - c.kappa)) -
                       c.B * std::exp(-c.beta * (x - 1.0)) / (1.0 + p20(x - c.lambda));
    density[static_cast<std::size_t>(k)] = f * s;
    r_phi[static_cast<std::size_t>(k)] = r * phi * s;
  }

  const double rho_n = 0.85 * c.rho_e, rho_0 = 1.15 * c.rho_e;
  auto embed = [&](double rho) {
    auto poly = [](const std::array<double, 4>& a, double u) { return a[0] + u * (a[1] + u * (a[2] + u * a[3])); };
    if (rho < rho_n) return poly(c.Fn, rho / rho_n - 1.0);
    if (rho < rho_0) return poly(c.F, rho / c.rho_e - 1.0);
    const double t = std::pow(rho / c.rho_s, c.eta);
    return c.F_e * (1.0 - std::log(t)) * t;
  };
  const double d_rho = c.rho_max_ratio * c.rho_e / static_cast<double>(c.n_rho - 1);
  std::vector<double> embedding(static_cast<std::size_t>(c.n_rho));
  for (int k = 0; k < c.n_rho; ++k) embedding[static_cast<std::size_t>(k)] = embed(d_rho * k);

  EAMPotential::Header h;
  h.comment = fmt::format("Cu analytic EAM Ec={:.4f} eV a0={:.4f} A cutoff={:.2f} A", c.cohesive_energy,
                          c.lattice_constant, c.cutoff);
  h.atomic_number = 29;
  h.atomic_mass = c.mass;
  h.lattice_constant = c.lattice_constant;
  h.lattice = "FCC";
  return EAMPotential(std::move(h), d_rho, std::move(embedding), d_r, std::move(density), std::move(r_phi),
                      c.cutoff);
}

}  // namespace coldloop::md
