#include "flatmap/io.hpp"

#include <ostream>

namespace flatmap::io {

Real real_from_json(const json& j, const char* what) {
  try {
    if (j.is_string()) return Real(j.get<std::string>());
    if (j.is_number()) return Real(j.dump());
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(what) + ": expected a number or decimal string");
}

std::string format(const Real& x, int digits) { return math::to_scientific(x, digits); }

namespace {

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string(where) + ": missing \"" + key + "\"");
  return j.at(key);
}

}  // namespace

Diffeo<Real> diffeo_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("diffeo: expected an object");
  const std::string kind = require(j, "kind", "diffeo").get<std::string>();
  try {
    if (kind == "identity") return Diffeo<Real>::identity();
    if (kind == "exp") return Diffeo<Real>::exp_family(real_from_json(require(j, "a", "exp"), "exp.a"));
    if (kind == "qs") {
      return Diffeo<Real>::qs(real_from_json(require(j, "s", "qs"), "qs.s"), real_from_json(require(j, "l", "qs"), "qs.l"));
    }
    if (kind == "zoom") {
      return zoom(diffeo_from_json(require(j, "of", "zoom")), real_from_json(require(j, "a", "zoom"), "zoom.a"),
                  real_from_json(require(j, "b", "zoom"), "zoom.b"));
    }
    if (kind == "compose") {
      return compose(diffeo_from_json(require(j, "outer", "compose")), diffeo_from_json(require(j, "inner", "compose")));
    }
    if (kind == "reflect") return reflect(diffeo_from_json(require(j, "of", "reflect")));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("diffeo: ") + e.what());
  }
  throw ConfigError("diffeo: unknown kind \"" + kind + "\"");
}

json diffeo_to_json(const Diffeo<Real>& d, int digits) {
  json j;
  switch (d.kind()) {
    case DiffeoKind::Identity:
      j["kind"] = "identity";
      break;
    case DiffeoKind::Primitive:
      j["kind"] = d.name();
      if (d.name() == "exp" && d.params().size() == 1) {
        j["a"] = format(d.params()[0], digits);
      } else {
        json p = json::array();
        for (const auto& v : d.params()) p.push_back(format(v, digits));
        j["params"] = p;
      }
      break;
    case DiffeoKind::Qs:
      j["kind"] = "qs";
      j["s"] = format(d.s(), digits);
      j["l"] = format(d.exponent(), digits);
      break;
    case DiffeoKind::Zoom:
      j["kind"] = "zoom";
      j["a"] = format(d.zoom_a(), digits);
      j["b"] = format(d.zoom_b(), digits);
      j["of"] = diffeo_to_json(d.child(), digits);
      break;
    case DiffeoKind::Compose:
      j["kind"] = "compose";
      j["outer"] = diffeo_to_json(d.outer(), digits);
      j["inner"] = diffeo_to_json(d.inner(), digits);
      break;
    case DiffeoKind::Reflect:
      j["kind"] = "reflect";
      j["of"] = diffeo_to_json(d.child(), digits);
      break;
  }
  return j;
}

MapX<Real> map_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("map: expected an object");
  MapX<Real> f;
  f.l1 = real_from_json(require(j, "l1", "map"), "map.l1");
  f.l2 = real_from_json(require(j, "l2", "map"), "map.l2");
  f.x1 = real_from_json(require(j, "x1", "map"), "map.x1");
  f.x2 = real_from_json(require(j, "x2", "map"), "map.x2");
  f.x3 = real_from_json(require(j, "x3", "map"), "map.x3");
  f.x4 = real_from_json(require(j, "x4", "map"), "map.x4");
  f.s = real_from_json(require(j, "s", "map"), "map.s");
  f.phi = j.contains("phi") ? diffeo_from_json(j.at("phi")) : Diffeo<Real>::identity();
  f.phil = j.contains("phil") ? diffeo_from_json(j.at("phil")) : Diffeo<Real>::identity();
  f.phir = j.contains("phir") ? diffeo_from_json(j.at("phir")) : Diffeo<Real>::identity();
  return f;
}

json map_to_json(const MapX<Real>& f, int digits) {
  json j;
  j["l1"] = format(f.l1, digits);
  j["l2"] = format(f.l2, digits);
  j["x1"] = format(f.x1, digits);
  j["x2"] = format(f.x2, digits);
  j["x3"] = format(f.x3, digits);
  j["x4"] = format(f.x4, digits);
  j["s"] = format(f.s, digits);
  j["phi"] = diffeo_to_json(f.phi, digits);
  j["phil"] = diffeo_to_json(f.phil, digits);
  j["phir"] = diffeo_to_json(f.phir, digits);
  return j;
}

namespace {

void write_level_row(std::ostream& os, const TraceLevel<Real>& t, int digits, bool full) {
  auto f = [&](const Real& x) { return format(x, digits); };
  os << t.n;
  if (full) {
    for (const auto& v : t.S) os << ',' << f(v);
    os << ',' << f(t.s);
    for (int i = 0; i < 4; ++i) os << ',' << f(t.w(i));
    os << ',' << f(t.alpha) << ',' << f(t.dist_phi) << ',' << f(t.dist_phil) << ',' << f(t.dist_phir);
  } else {
    // a failed level has no valid coordinates
    for (int i = 0; i < 14; ++i) os << ',';
  }
  os << ',' << t.dag_depth << ',' << (t.renormalizable ? 1 : 0) << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& os, const RenormTrace<Real>& trace, int digits) {
  os << "n,S1,S2,S3,S4,S5,s,y2,y3,y4,y5,alpha,dist_phi,dist_phil,dist_phir,dag_depth,renormalizable\n";
  for (const auto& t : trace.levels) write_level_row(os, t, digits, true);
  if (trace.failure) {
    TraceLevel<Real> t = trace.failure->summary;
    t.n = trace.failure->level;
    t.renormalizable = false;
    t.dag_depth = std::max({t.map.phi.depth(), t.map.phil.depth(), t.map.phir.depth()});
    write_level_row(os, t, digits, false);
  }
}

json trace_summary(const RenormTrace<Real>& trace, int digits) {
  json j;
  j["requested_depth"] = trace.requested_depth;
  j["depth"] = trace.depth();
  j["precision_bits"] = trace.policy.mantissa_bits;
  j["precision_exhausted"] = trace.precision_exhausted;
  if (!trace.note.empty()) j["note"] = trace.note;
  if (trace.failure) {
    j["failure"] = {{"level", trace.failure->level}, {"side", to_string(trace.failure->side)}};
  } else {
    j["failure"] = nullptr;
  }
  if (!trace.levels.empty()) {
    Real lo = trace.levels.front().alpha, hi = lo;
    for (const auto& t : trace.levels) {
      lo = std::min(lo, t.alpha);
      hi = std::max(hi, t.alpha);
    }
    j["alpha_min"] = format(lo, digits);
    j["alpha_max"] = format(hi, digits);
    j["final_map"] = map_to_json(trace.levels.back().map, digits);
  }
  return j;
}

namespace {

json matrix_json(const Mat4<Real>& m, int digits) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(format(m(r, c), digits));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vec4<Real>& v, int digits) {
  json a = json::array();
  for (int i = 0; i < 4; ++i) a.push_back(format(v(i), digits));
  return a;
}

}  // namespace

json spectrum_to_json(const SpectralData<Real>& d, int digits) {
  json j;
  j["l1"] = format(d.l1, digits);
  j["l2"] = format(d.l2, digits);
  j["lambda_u"] = format(d.lambda_u, digits);
  j["lambda_s"] = format(d.lambda_s, digits);
  j["eigenvalues"] = {"0", "1", format(d.lambda_s, digits), format(d.lambda_u, digits)};
  j["quadrant"] = to_string(d.quadrant);
  j["gamma_distance"] = format(d.gamma_distance, digits);
  j["even_model"] = to_string(d.model);
  j["L1"] = matrix_json(d.mats.L1, digits);
  j["L2"] = matrix_json(d.mats.L2, digits);
  j["L_even"] = matrix_json(d.mats.L_even, digits);
  j["L_odd"] = matrix_json(d.mats.L_odd, digits);
  j["E_u"] = vector_json(d.E_u, digits);
  j["E_s"] = vector_json(d.E_s, digits);
  j["E_1"] = vector_json(d.E_1, digits);
  j["E_0"] = vector_json(d.E_0, digits);
  j["F_u"] = vector_json(d.F_u, digits);
  j["F_s"] = vector_json(d.F_s, digits);
  j["F_1"] = vector_json(d.F_1, digits);
  j["F_0"] = vector_json(d.F_0, digits);
  return j;
}

json geometry_to_json(const GeometryReport<Real>& r, int digits) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["lambda_u"] = format(r.spectral.lambda_u, digits);
  j["quadrant"] = to_string(r.spectral.quadrant);
  j["even_model"] = to_string(r.selection.model);
  j["residual_spread"] = {{"L2*L1", format(r.selection.spread_step_product, digits)},
                          {"L_even", format(r.selection.spread_displayed, digits)}};
  j["basis_condition"] = format(r.decomposition.basis_condition, digits);
  auto coords = [&](const std::vector<Coordinates<Real>>& cs) {
    json a = json::array();
    for (const auto& c : cs) {
      a.push_back({{"level", c.level},
                   {"C_u", format(c.u, digits)},
                   {"C_s", format(c.s, digits)},
                   {"C_1", format(c.one, digits)},
                   {"C_0", format(c.zero, digits)},
                   {"cosine", format(c.direction_cosine, digits)},
                   {"norm", format(c.norm, digits)}});
    }
    return a;
  };
  j["even"] = coords(r.decomposition.even);
  j["odd"] = coords(r.decomposition.odd);
  json g = json::array();
  for (const auto& v : r.decomposition.growth) g.push_back(format(v, digits));
  j["growth"] = g;
  if (r.Gu) {
    j["G_u"] = {{"value", format(r.Gu->value, digits)}, {"error", format(r.Gu->error, digits)}};
  } else {
    j["G_u"] = nullptr;
  }
  j["max_w_norm"] = r.max_w_norm;
  j["final_cosine_even"] = r.final_cosine_even;
  j["final_cosine_odd"] = r.final_cosine_odd;
  j["loglog_alpha"] = {{"slope", r.loglog_alpha.slope}, {"intercept", r.loglog_alpha.intercept}, {"r2", r.loglog_alpha.r2}};
  if (r.boundary_G) j["boundary_G"] = *r.boundary_G;
  return j;
}

void write_dimension_csv(std::ostream& os, const std::vector<DimensionRun>& runs, int digits) {
  const bool labelled = runs.size() > 1;
  if (labelled) os << "map,";
  os << "depth,scale,box_count,local_slope\n";
  auto f = [&](double x) { return math::to_scientific(x, digits); };
  for (const auto& run : runs) {
    for (const auto& r : run.estimates) {
      for (const auto& c : r.counts) {
        if (labelled) os << run.name << ',';
        os << r.depth << ',' << f(c.scale) << ',' << c.box_count << ',' << f(c.local_slope) << '\n';
      }
    }
  }
}

}  // namespace flatmap::io
