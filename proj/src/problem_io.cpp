#include "problem_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace dsm {

using nlohmann::json;

namespace {

GalleryParams params_from_json(const json& doc) {
    GalleryParams p;
    p.n = doc.value("n", p.n);
    p.seed = doc.value("seed", p.seed);
    if (doc.contains("params")) {
        const json& q = doc.at("params");
        p.kappa = q.value("kappa", p.kappa);
        p.cond = q.value("cond", p.cond);
        p.rank = q.value("rank", p.rank);
        p.y_scale = q.value("y_scale", p.y_scale);
        p.eps = q.value("eps", p.eps);
    }
    if (doc.contains("norm")) {
        const json& q = doc.at("norm");
        const std::string kind = q.value("kind", std::string("l2"));
        if (kind == "lp") {
            p.norm_kind = NormKind::Lp;
            p.p_norm = q.value("p", 2.0);
        } else if (kind != "l2") {
            throw UsageError("norm.kind must be 'l2' or 'lp'");
        }
    }
    if (doc.contains("asserted_constants"))
        p.theta = doc.at("asserted_constants").value("theta", p.theta);
    return p;
}

Vector vector_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) throw UsageError(std::string(what) + " must be a JSON array");
    Vector v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
    return v;
}

} // namespace

OperatorProblem problem_from_json(const json& doc) {
    const std::string kind = doc.value("kind", std::string());
    if (kind.empty()) throw UsageError("problem file needs a 'kind' field");

    const auto names = gallery_names();
    if (std::find(names.begin(), names.end(), kind) != names.end()) {
        GalleryParams p = params_from_json(doc);
        return make_gallery(kind, p);
    }
    if (kind != "matrix")
        throw UsageError("unknown problem kind '" + kind + "' (gallery kind or 'matrix')");

    const int n = doc.value("n", 0);
    if (n <= 0) throw UsageError("matrix problem needs a positive 'n'");
    if (!doc.contains("data")) throw UsageError("matrix problem needs a 'data' array");
    const json& data = doc.at("data");
    if (static_cast<int>(data.size()) != n * n)
        throw UsageError("'data' must hold n*n row-major entries");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = data[i * n + j].get<double>();

    GalleryParams p = params_from_json(doc);
    OperatorProblemConfig cfg{VectorSpace(n, p.norm_kind, p.p_norm)};
    cfg.name = doc.value("name", std::string("matrix"));
    cfg.linear_matrix = m;
    cfg.rhs = doc.contains("f") ? vector_from_json(doc.at("f"), "f") : Vector(Vector::Zero(n));
    if (doc.contains("y")) cfg.known_solution = vector_from_json(doc.at("y"), "y");
    if (doc.contains("asserted_constants")) {
        const json& c = doc.at("asserted_constants");
        cfg.smoothness.c0 = c.value("c0", 0.0);
        cfg.smoothness.kappa = c.value("kappa", 1.0);
        cfg.resolvent.c1 = c.value("c1", 1.0);
        cfg.resolvent.b = c.value("b", 1.0);
        cfg.resolvent.eps0 = c.value("eps0", 1e3);
        cfg.resolvent.theta = c.value("theta", 0.0);
        cfg.provenance = ConstantProvenance::Asserted;
    } else {
        cfg.resolvent.eps0 = 1e3;
        cfg.provenance = ConstantProvenance::Estimated;
    }
    return OperatorProblem(std::move(cfg));
}

OperatorProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IoError("cannot parse problem file '" + path + "': " + e.what());
    }
    return problem_from_json(doc);
}

json problem_descriptor(const std::string& kind, const GalleryParams& p) {
    json doc;
    doc["kind"] = kind;
    doc["n"] = p.n;
    doc["seed"] = p.seed;
    doc["params"] = {{"kappa", p.kappa}, {"cond", p.cond}, {"rank", p.rank},
                     {"y_scale", p.y_scale}, {"eps", p.eps}};
    doc["norm"] = {{"kind", p.norm_kind == NormKind::Lp ? "lp" : "l2"}, {"p", p.p_norm}};
    return doc;
}

bool looks_like_path(const std::string& spec) {
    return spec.find('/') != std::string::npos || spec.find('.') != std::string::npos ||
           std::filesystem::exists(spec);
}

OperatorProblem resolve_problem(const std::string& spec, const GalleryParams& params,
                                json* descriptor_out) {
    if (looks_like_path(spec)) {
        std::ifstream in(spec);
        if (!in) throw IoError("cannot open problem file '" + spec + "'");
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw IoError("cannot parse problem file '" + spec + "': " + e.what());
        }
        if (descriptor_out) *descriptor_out = doc;
        return problem_from_json(doc);
    }
    if (descriptor_out) *descriptor_out = problem_descriptor(spec, params);
    return make_gallery(spec, params);
}

} // namespace dsm
