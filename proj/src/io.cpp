#include "vortex/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vortex::io {

namespace {

using nlohmann::json;

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open())
        throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += ch; break;
        }
    }
    return out;
}

std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

// JSON has no nan/inf literals
std::string json_number(double x) { return std::isfinite(x) ? fmt_double(x) : "null"; }

std::string vector_json(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(v[i]);
    }
    return out + "]";
}

std::string field_json(const VertexField& f) {
    std::string out = "[";
    for (int x = 0; x < f.size(); ++x) {
        if (x) out += ",";
        out += fmt_double(f(x));
    }
    return out + "]";
}

std::string multifield_json(const MultiField& f) {
    std::string out = "[";
    for (int i = 0; i < f.rank(); ++i) {
        if (i) out += ",";
        out += field_json(f[i]);
    }
    return out + "]";
}

std::string vertices_json(const WeightedGraph& g) {
    std::string out = "[";
    for (int x = 0; x < g.size(); ++x) {
        if (x) out += ",";
        out += quoted(g.vertex_id(x));
    }
    return out + "]";
}

} // namespace

WeightedGraph parse_graph(const std::string& json_text) {
    const json j = parse_json_text(json_text);
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
        throw Error("graph file needs a \"vertices\" array");

    std::vector<std::string> ids;
    std::vector<double> mu;
    for (const json& v : j["vertices"]) {
        if (!v.is_object() || !v.contains("id") || !v["id"].is_string())
            throw Error("each vertex needs a string \"id\"");
        ids.push_back(v["id"].get<std::string>());
        mu.push_back(v.value("mu", 1.0));
    }

    std::vector<EdgeSpec> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array())
            throw Error("\"edges\" must be an array");
        for (const json& e : j["edges"]) {
            if (!e.is_object() || !e.contains("u") || !e.contains("v"))
                throw Error("each edge needs endpoints \"u\" and \"v\"");
            edges.push_back(EdgeSpec{e["u"].get<std::string>(), e["v"].get<std::string>(),
                                     e.value("w", 1.0)});
        }
    }
    return WeightedGraph(std::move(ids), std::move(mu), edges);
}

WeightedGraph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

ProblemFile parse_problem(const std::string& json_text) {
    const json j = parse_json_text(json_text);
    if (!j.is_object())
        throw Error("problem file must be a JSON object");

    ProblemFile pf;
    if (j.contains("cartan")) {
        const json& c = j["cartan"];
        if (!c.is_object())
            throw Error("\"cartan\" must be an object");
        pf.has_cartan = true;
        if (c.contains("preset")) {
            pf.preset = c["preset"].get<std::string>();
        } else if (c.contains("K")) {
            const json& K = c["K"];
            if (!K.is_array() || K.empty())
                throw Error("\"K\" must be a nonempty array of rows");
            const int n = static_cast<int>(K.size());
            pf.K.resize(n, n);
            for (int i = 0; i < n; ++i) {
                if (!K[i].is_array() || static_cast<int>(K[i].size()) != n)
                    throw Error("\"K\" must be square");
                for (int k = 0; k < n; ++k)
                    pf.K(i, k) = K[i][k].get<double>();
            }
            if (c.contains("P")) {
                const json& P = c["P"];
                if (!P.is_array() || static_cast<int>(P.size()) != n)
                    throw Error("\"P\" must have one entry per row of K");
                pf.has_P = true;
                pf.P.resize(n);
                for (int i = 0; i < n; ++i)
                    pf.P[i] = P[i].get<double>();
            }
        } else {
            throw Error("\"cartan\" needs either \"preset\" or \"K\"");
        }
    }

    if (j.contains("vortices")) {
        const json& v = j["vortices"];
        if (!v.is_object() || !v.contains("points") || !v["points"].is_array())
            throw Error("\"vortices\" needs a \"points\" array of per-component lists");
        pf.has_vortices = true;
        for (const json& comp : v["points"]) {
            if (!comp.is_array())
                throw Error("each entry of \"points\" must be a list of vertex ids");
            std::vector<std::string> lst;
            for (const json& id : comp)
                lst.push_back(id.get<std::string>());
            pf.point_ids.push_back(std::move(lst));
        }
    }
    return pf;
}

ProblemFile load_problem(const std::string& path) { return parse_problem(read_file(path)); }

CartanInput cartan_input(const ProblemFile& pf) {
    if (!pf.has_cartan)
        throw Error("problem file has no \"cartan\" section");
    CartanInput in;
    if (!pf.preset.empty()) {
        const CartanPreset p = cartan_preset(pf.preset);
        in.K = p.K;
        in.P = p.P;
        in.has_P = true;
    } else {
        in.K = pf.K;
        in.has_P = pf.has_P;
        if (pf.has_P)
            in.P = pf.P;
    }
    return in;
}

std::vector<std::vector<int>> resolve_points(const ProblemFile& pf, const WeightedGraph& g,
                                             int rank) {
    std::vector<std::vector<int>> pts(rank);
    if (!pf.has_vortices)
        return pts;
    if (static_cast<int>(pf.point_ids.size()) != rank) {
        std::ostringstream msg;
        msg << "vortices.points has " << pf.point_ids.size() << " components but the system rank is "
            << rank;
        throw Error(msg.str());
    }
    for (int i = 0; i < rank; ++i)
        for (const std::string& id : pf.point_ids[i])
            pts[i].push_back(g.index_of(id));
    return pts;
}

std::vector<int> flatten_points(const ProblemFile& pf, const WeightedGraph& g) {
    std::vector<int> pts;
    if (!pf.has_vortices)
        return pts;
    for (const auto& comp : pf.point_ids)
        for (const std::string& id : comp)
            pts.push_back(g.index_of(id));
    return pts;
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string solve_report_json(const SolveReport& rep, const WeightedGraph& g) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"schema\": \"vortex-solve-report\",\n";
    o << "  \"lambda\": " << fmt_double(rep.lambda) << ",\n";
    o << "  \"lambda0\": " << fmt_double(rep.lambda0) << ",\n";
    o << "  \"converged\": " << (rep.converged ? "true" : "false") << ",\n";
    o << "  \"status\": " << quoted(to_string(rep.status)) << ",\n";
    o << "  \"message\": " << quoted(rep.message) << ",\n";
    o << "  \"iterations\": " << rep.iterations << ",\n";
    o << "  \"J\": " << fmt_double(rep.J_value) << ",\n";
    o << "  \"grad_norm\": " << fmt_double(rep.grad_norm) << ",\n";
    o << "  \"residual_inf\": " << fmt_double(rep.residual_inf) << ",\n";
    o << "  \"identity_310_err\": " << fmt_double(rep.identity_310_err) << ",\n";
    o << "  \"identity_313_err\": " << fmt_double(rep.identity_313_err) << ",\n";
    o << "  \"t\": " << vector_json(rep.t) << ",\n";
    o << "  \"c\": " << vector_json(rep.c) << ",\n";
    o << "  \"admissible_margins\": " << vector_json(rep.admissible_margins) << ",\n";
    o << "  \"vertices\": " << vertices_json(g) << ",\n";
    o << "  \"w\": " << multifield_json(rep.w) << ",\n";
    o << "  \"v\": " << multifield_json(rep.v) << ",\n";
    o << "  \"u_hat\": " << multifield_json(rep.u_hat) << ",\n";
    o << "  \"u_orig\": " << multifield_json(rep.u_orig) << "\n";
    o << "}\n";
    return o.str();
}

std::string abelian_report_json(const AbelianSolution& sol, const AbelianProblem& p) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"schema\": \"vortex-abelian-report\",\n";
    o << "  \"lambda\": " << fmt_double(p.lambda) << ",\n";
    o << "  \"M\": " << p.M << ",\n";
    o << "  \"converged\": " << (sol.converged ? "true" : "false") << ",\n";
    o << "  \"iterations\": " << sol.iterations << ",\n";
    o << "  \"residual_inf\": " << fmt_double(sol.residual_inf) << ",\n";
    o << "  \"integral_check\": " << fmt_double(sol.integral_check) << ",\n";
    o << "  \"vertices\": " << vertices_json(p.g) << ",\n";
    o << "  \"u\": " << field_json(sol.u) << ",\n";
    o << "  \"v\": " << field_json(sol.v) << "\n";
    o << "}\n";
    return o.str();
}

std::string critical_bracket_json(const CriticalBracket& br) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"schema\": \"vortex-critical-bracket\",\n";
    o << "  \"lo\": " << fmt_double(br.lo) << ",\n";
    o << "  \"hi\": " << fmt_double(br.hi) << ",\n";
    o << "  \"lower_bound_16piM_over_V\": " << fmt_double(br.lower_bound) << "\n";
    o << "}\n";
    return o.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o << "lambda,converged,J,residual_inf,min_t,max_u_orig,iterations\n";
    for (const SweepRow& r : rows) {
        o << fmt_double(r.lambda) << "," << (r.converged ? "true" : "false") << ","
          << fmt_double(r.J) << "," << fmt_double(r.residual_inf) << "," << fmt_double(r.min_t)
          << "," << fmt_double(r.max_u_orig) << "," << r.iterations << "\n";
    }
    return o.str();
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o << "[\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i];
        o << "  {\"lambda\": " << json_number(r.lambda)
          << ", \"converged\": " << (r.converged ? "true" : "false")
          << ", \"J\": " << json_number(r.J)
          << ", \"residual_inf\": " << json_number(r.residual_inf)
          << ", \"min_t\": " << json_number(r.min_t)
          << ", \"max_u_orig\": " << json_number(r.max_u_orig)
          << ", \"iterations\": " << r.iterations << "}" << (i + 1 < rows.size() ? "," : "")
          << "\n";
    }
    o << "]\n";
    return o.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out.is_open())
        throw Error("cannot write file: " + path);
    out << text;
    if (!out.good())
        throw Error("write failed: " + path);
}

} // namespace vortex::io
