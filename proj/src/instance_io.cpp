#include "badmm/instance_io.hpp"

#include <fstream>
#include <json.hpp>

#include "badmm/errors.hpp"

namespace badmm {

using nlohmann::json;

namespace {

constexpr const char* kInstanceFormat = "badmm-instance";
constexpr const char* kCertificateFormat = "badmm-certificate";

json vec_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec json_vec(const json& a) {
  if (!a.is_array()) throw InvalidArgumentError("expected a numeric array");
  Vec v(static_cast<Index>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
  return v;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat json_mat(const json& a, Index cols) {
  if (!a.is_array()) throw InvalidArgumentError("expected a matrix as an array of rows");
  Mat m(static_cast<Index>(a.size()), cols);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_array() || static_cast<Index>(a[i].size()) != cols) {
      throw ShapeError("matrix row has the wrong length");
    }
    for (Index j = 0; j < cols; ++j) m(static_cast<Index>(i), j) = a[i][static_cast<size_t>(j)].get<double>();
  }
  return m;
}

json blockvec_json(const BlockVector& x) { return vec_json(x.data()); }

BlockVector json_blockvec(const json& a, const BlockSizes& sizes) { return BlockVector(sizes, json_vec(a)); }

json metadata_json(const Metadata& md) {
  return json{{"m", md.m},
              {"L", md.L},
              {"M_psi", md.M_psi},
              {"D_psi", md.D_psi},
              {"d_bar", md.d_bar},
              {"grad_bound", md.grad_bound},
              {"nu_plus", md.nu_plus},
              {"F_inf", md.F_inf},
              {"F_sup", md.F_sup},
              {"indicator_terms", md.indicator_terms}};
}

Metadata json_metadata(const json& j) {
  Metadata md;
  md.m = j.at("m").get<std::vector<double>>();
  md.L = j.at("L").get<std::vector<double>>();
  md.M_psi = j.at("M_psi").get<double>();
  md.D_psi = j.at("D_psi").get<double>();
  md.d_bar = j.at("d_bar").get<double>();
  md.grad_bound = j.at("grad_bound").get<double>();
  md.nu_plus = j.at("nu_plus").get<double>();
  md.F_inf = j.at("F_inf").get<double>();
  md.F_sup = j.at("F_sup").get<double>();
  md.indicator_terms = j.value("indicator_terms", true);
  return md;
}

json parse_stream(std::istream& is) {
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

void save_instance(std::ostream& os, const ProblemInstance& inst) {
  const auto* quad = dynamic_cast<const QuadraticOracle*>(&inst.smooth());
  if (!quad) throw InvalidArgumentError("only quadratic smooth parts can be serialized");
  json doc;
  doc["format"] = kInstanceFormat;
  doc["version"] = 1;
  json blocks = json::array();
  for (Index s : inst.sizes().sizes()) blocks.push_back(s);
  doc["blocks"] = blocks;

  json smooth{{"kind", "quadratic"}, {"r", vec_json(quad->linear())}};
  if (quad->is_diagonal()) {
    smooth["P_diagonal"] = vec_json(quad->diag());
  } else {
    smooth["P"] = mat_json(quad->dense());
  }
  doc["smooth"] = smooth;

  json terms = json::array();
  for (Index t = 0; t < inst.count(); ++t) {
    auto w = inst.term(t).box_radius();
    if (!w) throw InvalidArgumentError("only box terms can be serialized");
    terms.push_back(json{{"kind", "box"}, {"radius", *w}});
  }
  doc["nonsmooth"] = terms;
  doc["rows"] = inst.map().rows();
  json A = json::array();
  for (const Mat& a : inst.map().blocks()) A.push_back(mat_json(a));
  doc["A"] = A;
  doc["b"] = vec_json(inst.rhs());
  if (inst.witness()) doc["witness"] = blockvec_json(*inst.witness());
  if (inst.initial_point()) doc["initial_point"] = blockvec_json(*inst.initial_point());
  if (inst.metadata()) doc["metadata"] = metadata_json(*inst.metadata());
  os << doc.dump(1) << '\n';
}

ProblemInstance load_instance(std::istream& is) {
  json doc = parse_stream(is);
  try {
    if (doc.value("format", "") != kInstanceFormat) throw InvalidArgumentError("not an instance document");
    BlockSizes sizes(doc.at("blocks").get<std::vector<Index>>());
    const json& sm = doc.at("smooth");
    if (sm.at("kind").get<std::string>() != "quadratic") throw InvalidArgumentError("unknown smooth kind");
    Vec r = json_vec(sm.at("r"));
    SmoothPtr smooth;
    if (sm.contains("P_diagonal")) {
      smooth = QuadraticOracle::diagonal(sizes, json_vec(sm.at("P_diagonal")), r);
    } else {
      smooth = std::make_shared<QuadraticOracle>(sizes, json_mat(sm.at("P"), sizes.total()), r);
    }
    const json& ns = doc.at("nonsmooth");
    if (static_cast<Index>(ns.size()) != sizes.count()) throw ShapeError("one nonsmooth term per block is required");
    std::vector<TermPtr> terms;
    for (Index t = 0; t < sizes.count(); ++t) {
      const json& e = ns[static_cast<size_t>(t)];
      if (e.at("kind").get<std::string>() != "box") throw InvalidArgumentError("unknown nonsmooth kind");
      terms.push_back(std::make_shared<BoxIndicator>(sizes.size(t), e.at("radius").get<double>()));
    }
    Index rows = doc.at("rows").get<Index>();
    const json& A = doc.at("A");
    if (static_cast<Index>(A.size()) != sizes.count()) throw ShapeError("one constraint block per variable block");
    std::vector<Mat> blocks;
    for (Index t = 0; t < sizes.count(); ++t) {
      Mat a = json_mat(A[static_cast<size_t>(t)], sizes.size(t));
      if (a.rows() != rows) throw ShapeError("constraint block has the wrong row count");
      blocks.push_back(std::move(a));
    }
    ProblemInstance inst(smooth, std::move(terms), BlockLinearMap(std::move(blocks)), json_vec(doc.at("b")));
    if (doc.contains("witness")) inst.set_witness(json_blockvec(doc["witness"], sizes));
    if (doc.contains("initial_point")) inst.set_initial_point(json_blockvec(doc["initial_point"], sizes));
    if (doc.contains("metadata")) inst.set_metadata(json_metadata(doc["metadata"]));
    return inst;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed instance: ") + e.what());
  }
}

void save_instance_file(const std::string& path, const ProblemInstance& inst) {
  std::ofstream os(path);
  if (!os) throw InvalidArgumentError("cannot open " + path + " for writing");
  save_instance(os, inst);
}

ProblemInstance load_instance_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgumentError("cannot open " + path);
  return load_instance(is);
}

const char* to_string(StopCriterion s) { return s == StopCriterion::absolute ? "absolute" : "relative"; }

StopCriterion parse_stop_criterion(const std::string& s) {
  if (s == "absolute") return StopCriterion::absolute;
  if (s == "relative") return StopCriterion::relative;
  throw InvalidArgumentError("unknown stopping criterion: " + s);
}

void save_certificate(std::ostream& os, const StoredCertificate& sc) {
  json doc;
  doc["format"] = kCertificateFormat;
  doc["version"] = 1;
  json blocks = json::array();
  for (Index s : sc.cert.x.sizes().sizes()) blocks.push_back(s);
  doc["blocks"] = blocks;
  doc["x"] = blockvec_json(sc.cert.x);
  doc["p"] = vec_json(sc.cert.p);
  doc["v"] = blockvec_json(sc.cert.v);
  doc["eps"] = sc.cert.eps;
  doc["criterion"] = to_string(sc.criterion);
  doc["rho"] = sc.rho;
  doc["eta"] = sc.eta;
  if (sc.x0) doc["x0"] = blockvec_json(*sc.x0);
  doc["algorithm"] = sc.algorithm;
  os << doc.dump(1) << '\n';
}

StoredCertificate load_certificate(std::istream& is) {
  json doc = parse_stream(is);
  try {
    if (doc.value("format", "") != kCertificateFormat) throw InvalidArgumentError("not a certificate document");
    BlockSizes sizes(doc.at("blocks").get<std::vector<Index>>());
    StoredCertificate sc;
    sc.cert.x = json_blockvec(doc.at("x"), sizes);
    sc.cert.p = json_vec(doc.at("p"));
    sc.cert.v = json_blockvec(doc.at("v"), sizes);
    sc.cert.eps = doc.at("eps").get<double>();
    sc.criterion = parse_stop_criterion(doc.at("criterion").get<std::string>());
    sc.rho = doc.at("rho").get<double>();
    sc.eta = doc.at("eta").get<double>();
    if (doc.contains("x0")) sc.x0 = json_blockvec(doc["x0"], sizes);
    sc.algorithm = doc.value("algorithm", "");
    return sc;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed certificate: ") + e.what());
  }
}

void save_certificate_file(const std::string& path, const StoredCertificate& sc) {
  std::ofstream os(path);
  if (!os) throw InvalidArgumentError("cannot open " + path + " for writing");
  save_certificate(os, sc);
}

StoredCertificate load_certificate_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgumentError("cannot open " + path);
  return load_certificate(is);
}

}  // namespace badmm
