#include "sweepplast/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sweepplast/errors.hpp"

namespace sweepplast {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, const std::string& where) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || tok.empty()) throw ParseError(where + ": bad number '" + tok + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
    std::vector<double> out;
    std::string s = text;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream is(s);
    for (std::string tok; is >> tok;) out.push_back(parse_number(tok, where));
    return out;
}

Vec parse_vec(const std::string& text, const std::string& where) {
    const auto v = parse_list(text, where);
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Rows separated by ';'.
Mat parse_mat(const std::string& text, const std::string& where) {
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    for (std::string row; std::getline(is, row, ';');) {
        if (trim(row).empty()) continue;
        rows.push_back(parse_list(row, where));
    }
    if (rows.empty()) return Mat(0, 0);
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw ParseError(where + ": ragged matrix rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

// One section with bookkeeping of consumed keys, so that typos are rejected.
class Section {
public:
    Section(const pt::ptree* tree, std::string name, std::string source)
        : tree_(tree), name_(std::move(name)), source_(std::move(source)) {}

    bool present() const { return tree_ != nullptr; }
    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::string raw(const std::string& key) {
        if (!has(key)) throw ParseError(where(key) + ": missing key");
        used_.insert(key);
        return tree_->find(key)->second.data();
    }
    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? raw(key) : fallback; }
    double number(const std::string& key) { return parse_number(raw(key), where(key)); }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    Vec vec(const std::string& key) { return parse_vec(raw(key), where(key)); }
    Mat mat(const std::string& key) { return parse_mat(raw(key), where(key)); }

    PiecewiseLinear table(const std::string& prefix) {
        PiecewiseLinear p;
        p.times = parse_list(raw(prefix + "_times"), where(prefix + "_times"));
        p.values = mat(prefix + "_values");
        p.validate(where(prefix));
        return p;
    }

    std::vector<std::string> keys() const {
        std::vector<std::string> k;
        if (tree_)
            for (const auto& kv : *tree_) k.push_back(kv.first);
        return k;
    }

    void finish() const {
        for (const auto& k : keys())
            if (!used_.count(k)) throw ParseError(where(k) + ": unknown key");
    }

    std::string where(const std::string& key) const { return source_ + ": [" + name_ + "] " + key; }

private:
    const pt::ptree* tree_;
    std::string name_, source_;
    std::set<std::string> used_;
};

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const double* data, Eigen::Index n) {
    std::string s;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += fmt_num(data[i]);
    }
    return s;
}
std::string fmt_vec(const Vec& v) { return fmt_list(v.data(), v.size()); }
std::string fmt_list(const std::vector<double>& v) { return fmt_list(v.data(), static_cast<Eigen::Index>(v.size())); }

std::string fmt_mat(const Mat& m) {
    std::string s;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) s += "; ";
        const Vec row = m.row(i).transpose();
        s += fmt_vec(row);
    }
    return s;
}

void write_table(std::ostream& out, const std::string& prefix, const PiecewiseLinear& p) {
    out << prefix << "_times = " << fmt_list(p.times) << '\n';
    out << prefix << "_values = " << fmt_mat(p.values) << '\n';
}

PlCurve curve(Section& s, const std::string& prefix) {
    PlCurve c;
    c.x = parse_list(s.raw(prefix + "_x"), s.where(prefix + "_x"));
    c.y = parse_list(s.raw(prefix + "_y"), s.where(prefix + "_y"));
    return c;
}

bool same_table(const PiecewiseLinear& a, const PiecewiseLinear& b) {
    return a.times == b.times && a.values.rows() == b.values.rows() && a.values.cols() == b.values.cols() &&
           a.values == b.values;
}

bool same_mat(const Mat& a, const Mat& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

bool same_curves(const std::vector<PlCurve>& a, const std::vector<PlCurve>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].x != b[i].x || a[i].y != b[i].y) return false;
    return true;
}

} // namespace

void Scenario::validate() const {
    if (!(t_end > 0.0)) throw ParseError("[time] t_end must be positive");
    if (!(dt > 0.0)) throw ParseError("[time] dt must be positive");
    for (int n : meshes)
        if (n < 2) throw ParseError("[output] meshes must be at least 2");
    try {
        if (model == ModelKind::Network) {
            const Eigen::Index m = network.E.rows();
            if (m == 0 || network.E.cols() == 0) throw ParseError("[model] E is empty");
            if (network.stiffness.size() != m) throw ParseError("[model] stiffness needs one entry per element");
            if (plasticity != PlasticityKind::None) {
                if (network.sigma_minus.size() != m || network.sigma_plus.size() != m)
                    throw ParseError("[model] yield limits need one entry per element");
                if ((network.sigma_minus.array() >= 0.0).any() || (network.sigma_plus.array() <= 0.0).any())
                    throw ParseError("[model] yield limits must satisfy sigma- < 0 < sigma+");
            }
            loads.prescribed.validate("[loads] prescribed");
            loads.forces.validate("[loads] force");
            if (loads.forces.width() != network.E.cols())
                throw ParseError("[loads] force_values needs one column per node");
            if (loads.prescribed.width() != network.R.rows())
                throw ParseError("[loads] prescribed_values needs one column per constraint row");
            if (plasticity == PlasticityKind::Hardening)
                (void)hardening.resolved(m, network.sigma_minus, network.sigma_plus);
        } else {
            rod.validate();
            if (plasticity == PlasticityKind::Hardening)
                (void)hardening.resolved(rod.N, Vec::Constant(rod.N, -1.0), Vec::Ones(rod.N));
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("invalid scenario: ") + e.what());
    }
}

Scenario parse_scenario(std::istream& in, const std::string& source) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    static const std::set<std::string> known{"model", "rod", "loads", "plasticity", "hardening", "time", "output"};
    for (const auto& kv : tree) {
        if (!known.count(kv.first)) throw ParseError(source + ": unknown section [" + kv.first + "]");
        if (!kv.second.data().empty()) throw ParseError(source + ": key '" + kv.first + "' outside any section");
    }
    auto section = [&](const std::string& name) {
        auto it = tree.find(name);
        return Section(it == tree.not_found() ? nullptr : &it->second, name, source);
    };

    Scenario sc;
    Section model = section("model");
    if (!model.present()) throw ParseError(source + ": missing [model]");
    sc.name = model.text("name", sc.name);
    const std::string kind = model.raw("kind");
    if (kind == "network") {
        sc.model = ModelKind::Network;
        const std::string c = model.text("constraint", "displacement");
        if (c == "displacement") sc.network.constraint_kind = ConstraintKind::Displacement;
        else if (c == "elongation") sc.network.constraint_kind = ConstraintKind::Elongation;
        else throw ParseError(model.where("constraint") + ": expected displacement or elongation");
        sc.network.E = model.mat("E");
        sc.network.R = model.mat("R");
        sc.network.stiffness = model.vec("stiffness");
        if (model.has("sigma_minus")) sc.network.sigma_minus = model.vec("sigma_minus");
        if (model.has("sigma_plus")) sc.network.sigma_plus = model.vec("sigma_plus");
    } else if (kind == "rod") {
        sc.model = ModelKind::Rod;
    } else {
        throw ParseError(model.where("kind") + ": expected network or rod");
    }
    model.finish();

    Section rod = section("rod");
    if (sc.model == ModelKind::Rod) {
        if (!rod.present()) throw ParseError(source + ": rod model needs a [rod] section");
        sc.rod.a = rod.number("a", sc.rod.a);
        sc.rod.b = rod.number("b", sc.rod.b);
        const double N = rod.number("N", sc.rod.N);
        if (N != std::floor(N) || N < 2 || N > 1e6) throw ParseError(rod.where("N") + ": expected an integer >= 2");
        sc.rod.N = static_cast<int>(N);
        auto poly = [&](const char* key, const Poly& fallback) {
            return rod.has(key) ? parse_list(rod.raw(key), rod.where(key)) : fallback;
        };
        sc.rod.stiffness = poly("stiffness", sc.rod.stiffness);
        sc.rod.sigma_minus = poly("sigma_minus", sc.rod.sigma_minus);
        sc.rod.sigma_plus = poly("sigma_plus", sc.rod.sigma_plus);
        const std::string path = rod.text("path", "exact");
        if (path == "exact") sc.rod_path = ElasticPath::ExactIntegral;
        else if (path == "discrete") sc.rod_path = ElasticPath::Discrete;
        else throw ParseError(rod.where("path") + ": expected exact or discrete");
        rod.finish();
    } else if (rod.present()) {
        throw ParseError(source + ": [rod] given for a network model");
    }

    Section loads = section("loads");
    if (!loads.present()) throw ParseError(source + ": missing [loads]");
    if (sc.model == ModelKind::Network) {
        sc.loads.prescribed = loads.table("prescribed");
        sc.loads.forces = loads.has("force_times") ? loads.table("force")
                                                   : PiecewiseLinear::constant(Vec::Zero(sc.network.E.cols()));
    } else {
        sc.rod.u_a = loads.table("u_a");
        sc.rod.u_b = loads.table("u_b");
        std::map<int, BodyForceTerm> terms;
        for (const auto& key : loads.keys()) {
            if (key.rfind("body", 0) != 0) continue;
            const auto us = key.find('_');
            int idx = 0;
            const auto [p, ec] = std::from_chars(key.data() + 4, key.data() + (us == std::string::npos ? key.size() : us), idx);
            (void)p;
            if (us == std::string::npos || ec != std::errc()) throw ParseError(loads.where(key) + ": unknown key");
            if (terms.count(idx)) continue;
            const std::string pre = "body" + std::to_string(idx);
            BodyForceTerm t;
            t.shape = parse_list(loads.raw(pre + "_shape"), loads.where(pre + "_shape"));
            t.amplitude = loads.table(pre);
            if (t.amplitude.width() != 1) throw ParseError(loads.where(pre) + ": amplitude must be scalar");
            terms[idx] = std::move(t);
        }
        for (auto& [i, t] : terms) sc.rod.body_force.push_back(std::move(t));
    }
    loads.finish();

    Section plast = section("plasticity");
    const std::string pk = plast.text("kind", "perfect");
    if (pk == "none") sc.plasticity = PlasticityKind::None;
    else if (pk == "perfect") sc.plasticity = PlasticityKind::Perfect;
    else if (pk == "hardening") sc.plasticity = PlasticityKind::Hardening;
    else throw ParseError(plast.where("kind") + ": expected none, perfect or hardening");
    plast.finish();

    Section hard = section("hardening");
    if (sc.plasticity == PlasticityKind::Hardening) {
        if (!hard.present()) throw ParseError(source + ": hardening needs a [hardening] section");
        const std::string hk = hard.raw("kind");
        if (hk == "kinematic") {
            sc.hardening.kind = HardeningKind::LinearKinematic;
            sc.hardening.H = hard.vec("H");
            sc.hardening.eta = hard.number("eta", 0.0);
            if (hard.has("offset_minus")) sc.hardening.offset_minus = hard.vec("offset_minus");
            if (hard.has("offset_plus")) sc.hardening.offset_plus = hard.vec("offset_plus");
        } else if (hk == "isotropic") {
            sc.hardening.kind = HardeningKind::PiecewiseLinearIsotropic;
            sc.hardening.xi_minus = {curve(hard, "xi_minus")};
            sc.hardening.xi_plus = {curve(hard, "xi_plus")};
        } else {
            throw ParseError(hard.where("kind") + ": expected kinematic or isotropic");
        }
        hard.finish();
    } else if (hard.present()) {
        throw ParseError(source + ": [hardening] given without hardening plasticity");
    }

    Section time = section("time");
    if (!time.present()) throw ParseError(source + ": missing [time]");
    sc.t_end = time.number("t_end");
    sc.dt = time.number("dt");
    sc.cq_time = time.number("cq_time", -1.0);
    time.finish();

    Section out = section("output");
    if (out.has("meshes")) {
        for (double v : parse_list(out.raw("meshes"), out.where("meshes"))) {
            if (v != std::floor(v) || v < 2 || v > 1e6) throw ParseError(out.where("meshes") + ": expected integers >= 2");
            sc.meshes.push_back(static_cast<int>(v));
        }
    }
    if (out.has("artifacts")) {
        std::istringstream is(out.raw("artifacts"));
        for (std::string a; is >> a;) sc.artifacts.push_back(a);
    }
    out.finish();

    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return parse_scenario(in, path);
}

void write_scenario(std::ostream& out, const Scenario& sc) {
    out << "[model]\nname = " << sc.name << '\n';
    if (sc.model == ModelKind::Network) {
        const auto& n = sc.network;
        out << "kind = network\n";
        out << "constraint = " << (n.constraint_kind == ConstraintKind::Displacement ? "displacement" : "elongation") << '\n';
        out << "E = " << fmt_mat(n.E) << '\n';
        out << "R = " << fmt_mat(n.R) << '\n';
        out << "stiffness = " << fmt_vec(n.stiffness) << '\n';
        if (n.sigma_minus.size()) out << "sigma_minus = " << fmt_vec(n.sigma_minus) << '\n';
        if (n.sigma_plus.size()) out << "sigma_plus = " << fmt_vec(n.sigma_plus) << '\n';
    } else {
        out << "kind = rod\n\n[rod]\n";
        out << "a = " << fmt_num(sc.rod.a) << "\nb = " << fmt_num(sc.rod.b) << "\nN = " << sc.rod.N << '\n';
        out << "stiffness = " << fmt_list(sc.rod.stiffness) << '\n';
        out << "sigma_minus = " << fmt_list(sc.rod.sigma_minus) << '\n';
        out << "sigma_plus = " << fmt_list(sc.rod.sigma_plus) << '\n';
        out << "path = " << (sc.rod_path == ElasticPath::ExactIntegral ? "exact" : "discrete") << '\n';
    }
    out << "\n[loads]\n";
    if (sc.model == ModelKind::Network) {
        write_table(out, "prescribed", sc.loads.prescribed);
        write_table(out, "force", sc.loads.forces);
    } else {
        write_table(out, "u_a", sc.rod.u_a);
        write_table(out, "u_b", sc.rod.u_b);
        for (std::size_t i = 0; i < sc.rod.body_force.size(); ++i) {
            const std::string pre = "body" + std::to_string(i + 1);
            out << pre << "_shape = " << fmt_list(sc.rod.body_force[i].shape) << '\n';
            write_table(out, pre, sc.rod.body_force[i].amplitude);
        }
    }
    out << "\n[plasticity]\nkind = "
        << (sc.plasticity == PlasticityKind::None ? "none" : sc.plasticity == PlasticityKind::Perfect ? "perfect" : "hardening")
        << '\n';
    if (sc.plasticity == PlasticityKind::Hardening) {
        const auto& h = sc.hardening;
        out << "\n[hardening]\n";
        if (h.kind == HardeningKind::LinearKinematic) {
            out << "kind = kinematic\nH = " << fmt_vec(h.H) << "\neta = " << fmt_num(h.eta) << '\n';
            if (h.offset_minus.size()) out << "offset_minus = " << fmt_vec(h.offset_minus) << '\n';
            if (h.offset_plus.size()) out << "offset_plus = " << fmt_vec(h.offset_plus) << '\n';
        } else {
            if (h.xi_minus.size() != 1 || h.xi_plus.size() != 1)
                throw Unsupported("write_scenario: only shared hardening curves are representable");
            out << "kind = isotropic\n";
            out << "xi_minus_x = " << fmt_list(h.xi_minus[0].x) << "\nxi_minus_y = " << fmt_list(h.xi_minus[0].y) << '\n';
            out << "xi_plus_x = " << fmt_list(h.xi_plus[0].x) << "\nxi_plus_y = " << fmt_list(h.xi_plus[0].y) << '\n';
        }
    }
    out << "\n[time]\nt_end = " << fmt_num(sc.t_end) << "\ndt = " << fmt_num(sc.dt) << '\n';
    if (sc.cq_time >= 0.0) out << "cq_time = " << fmt_num(sc.cq_time) << '\n';
    if (!sc.meshes.empty() || !sc.artifacts.empty()) {
        out << "\n[output]\n";
        if (!sc.meshes.empty()) {
            out << "meshes =";
            for (int m : sc.meshes) out << ' ' << m;
            out << '\n';
        }
        if (!sc.artifacts.empty()) {
            out << "artifacts =";
            for (const auto& a : sc.artifacts) out << ' ' << a;
            out << '\n';
        }
    }
}

bool same_scenario(const Scenario& a, const Scenario& b) {
    if (a.name != b.name || a.model != b.model || a.plasticity != b.plasticity || a.t_end != b.t_end ||
        a.dt != b.dt || a.cq_time != b.cq_time || a.meshes != b.meshes || a.artifacts != b.artifacts)
        return false;
    if (a.model == ModelKind::Network) {
        const auto &x = a.network, &y = b.network;
        if (x.constraint_kind != y.constraint_kind || !same_mat(x.E, y.E) || !same_mat(x.R, y.R) ||
            !same_mat(x.stiffness, y.stiffness) || !same_mat(x.sigma_minus, y.sigma_minus) ||
            !same_mat(x.sigma_plus, y.sigma_plus))
            return false;
        if (!same_table(a.loads.prescribed, b.loads.prescribed) || !same_table(a.loads.forces, b.loads.forces)) return false;
    } else {
        const auto &x = a.rod, &y = b.rod;
        if (x.a != y.a || x.b != y.b || x.N != y.N || x.stiffness != y.stiffness || x.sigma_minus != y.sigma_minus ||
            x.sigma_plus != y.sigma_plus || a.rod_path != b.rod_path || !same_table(x.u_a, y.u_a) ||
            !same_table(x.u_b, y.u_b) || x.body_force.size() != y.body_force.size())
            return false;
        for (std::size_t i = 0; i < x.body_force.size(); ++i)
            if (x.body_force[i].shape != y.body_force[i].shape ||
                !same_table(x.body_force[i].amplitude, y.body_force[i].amplitude))
                return false;
    }
    if (a.plasticity == PlasticityKind::Hardening) {
        const auto &x = a.hardening, &y = b.hardening;
        if (x.kind != y.kind || x.eta != y.eta || !same_mat(x.H, y.H) || !same_mat(x.offset_minus, y.offset_minus) ||
            !same_mat(x.offset_plus, y.offset_plus) || !same_curves(x.xi_minus, y.xi_minus) ||
            !same_curves(x.xi_plus, y.xi_plus))
            return false;
    }
    return true;
}

} // namespace sweepplast
