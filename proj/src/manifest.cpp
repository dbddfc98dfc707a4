#include "manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace dsm {

using nlohmann::json;

std::string tool_version() { return "dsm 0.1.0"; }

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

namespace {

void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,r,residual,envelope,dist_to_w,dist_to_y\n";
    for (const TrajectoryPoint& pt : traj.points) {
        append_number(out, pt.t);
        out += ',';
        append_number(out, pt.r);
        out += ',';
        append_number(out, pt.residual);
        out += ',';
        append_number(out, pt.envelope);
        out += ',';
        if (pt.dist_to_w) append_number(out, *pt.dist_to_w);
        out += ',';
        if (pt.dist_to_y) append_number(out, *pt.dist_to_y);
        out += '\n';
    }
    return out;
}

std::string path_csv(const RegularizedPath& path, const OperatorProblem& problem) {
    std::string out = "abs_a,residual,newton_iters,dist_to_limit,dist_to_y\n";
    const std::optional<Vector>& y = problem.known_solution();
    for (const PathEntry& e : path.entries) {
        append_number(out, std::abs(e.a));
        out += ',';
        append_number(out, e.residual);
        out += ',';
        out += std::to_string(e.newton_iters);
        out += ',';
        if (e.w.size() > 0 && path.limit_estimate)
            append_number(out, problem.norm(Vector(e.w - *path.limit_estimate)));
        else if (e.w_complex.size() > 0 && path.limit_estimate_complex)
            append_number(out, problem.norm(ComplexVector(e.w_complex - *path.limit_estimate_complex)));
        out += ',';
        if (y) {
            if (e.w.size() > 0)
                append_number(out, problem.norm(Vector(e.w - *y)));
            else if (e.w_complex.size() > 0)
                append_number(out, problem.norm(ComplexVector(e.w_complex - y->cast<Complex>())));
        }
        out += '\n';
    }
    return out;
}

std::string phi_csv(const PhiTrajectory& phi) {
    std::string out = "t,phi\n";
    for (std::size_t i = 0; i < phi.t.size(); ++i) {
        append_number(out, phi.t[i]);
        out += ',';
        append_number(out, phi.phi[i]);
        out += '\n';
    }
    return out;
}

json schedule_json(const Schedule& s) {
    return json{{"p", s.p()},
                {"k", s.k()},
                {"lambda", s.lambda()},
                {"c2", s.c2()},
                {"c3", s.c3()},
                {"c4", s.c4()},
                {"c5", s.c5()},
                {"c6", s.c6()},
                {"b", s.b()},
                {"kappa", s.kappa()},
                {"g0", s.g0()},
                {"r0", s.r0()},
                {"theta", s.theta()},
                {"eps0", s.eps0()},
                {"decay_balance", Schedule::decay_balance}};
}

json gates_json(const GateReport& gates) {
    json arr = json::array();
    for (const GateCheck& g : gates.gates) {
        json item{{"name", g.name}, {"lhs", g.lhs},   {"rhs", g.rhs},
                  {"slack", g.slack}, {"pass", g.pass}};
        if (!g.remediation.empty()) item["remediation"] = g.remediation;
        arr.push_back(item);
    }
    return json{{"checks", arr}, {"all_pass", gates.all_pass}};
}

json envelope_json(const EnvelopeReport& report) {
    return json{{"samples", report.rows.size()},
                {"min_rel_slack", report.min_rel_slack},
                {"tol_env", report.tol_env},
                {"pass", report.pass}};
}

json audit_json(const MasterInequalityReport& report) {
    return json{{"samples", report.rows.size()},
                {"worst_ratio", report.worst_ratio},
                {"pass", report.pass}};
}

json certificate_json(const Certificate& cert) {
    return json{{"condition9_margin", cert.condition9_margin},
                {"condition10_ok", cert.condition10_ok},
                {"sandwich_ok", cert.sandwich_ok},
                {"max_violation", cert.max_violation},
                {"worst_t", cert.worst_t},
                {"phi_blew_up", cert.phi_blew_up},
                {"pass", cert.passed()}};
}

json trajectory_metrics_json(const Trajectory& traj) {
    json out{{"status", to_string(traj.status)},
             {"t_final", traj.t_final},
             {"steps", traj.steps},
             {"rejected", traj.rejected},
             {"step_rejection_rate", traj.step_rejection_rate},
             {"resolvent_solves", traj.resolvent_solves},
             {"oracle_newton_iters", traj.oracle_newton_iters},
             {"max_u_norm", traj.max_u_norm},
             {"max_w_norm", traj.max_w_norm},
             {"max_imag_ratio", traj.max_imag_ratio},
             {"final_imag_ratio", traj.final_imag_ratio}};
    if (!traj.points.empty()) {
        const TrajectoryPoint& last = traj.points.back();
        out["final_residual"] = last.residual;
        out["final_r"] = last.r;
        if (last.dist_to_y) out["final_dist_to_y"] = *last.dist_to_y;
    }
    if (!traj.message.empty()) out["message"] = traj.message;
    return out;
}

} // namespace dsm
