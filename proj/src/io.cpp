#include "rw/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace rw {

using nlohmann::json;

std::string double_to_string(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("double_to_string: conversion failed");
    return std::string(buf, res.ptr);
}

double string_to_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("string_to_double: invalid number '" + s + "'");
    return v;
}

std::string measure_to_json(const AtomicMeasure& mu) {
    json j;
    j["d"] = mu.d();
    j["s"] = double_to_string(mu.s());
    json atoms = json::array();
    for (const Atom& a : mu.atoms()) {
        json row = json::array();
        for (int c = 0; c < mu.d(); ++c) row.push_back(double_to_string(a.pos[c]));
        row.push_back(double_to_string(a.w));
        atoms.push_back(std::move(row));
    }
    j["atoms"] = std::move(atoms);
    return j.dump(2);
}

AtomicMeasure measure_from_json(const std::string& text) {
    json j = json::parse(text);
    AmbientParams amb;
    amb.d = j.at("d").get<int>();
    amb.s = string_to_double(j.at("s").get<std::string>());
    std::vector<Atom> atoms;
    for (const auto& row : j.at("atoms")) {
        if (static_cast<int>(row.size()) != amb.d + 1)
            throw std::runtime_error("measure_from_json: atom row has wrong arity");
        Atom a;
        for (int c = 0; c < amb.d; ++c)
            a.pos[static_cast<std::size_t>(c)] = string_to_double(row[c].get<std::string>());
        a.w = string_to_double(row[amb.d].get<std::string>());
        atoms.push_back(a);
    }
    return AtomicMeasure(amb, std::move(atoms));
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

json point_to_json(const Point& p) {
    return json::array({double_to_string(p[0]), double_to_string(p[1]),
                        double_to_string(p[2])});
}

Point point_from_json(const json& j) {
    return Point{string_to_double(j[0].get<std::string>()),
                 string_to_double(j[1].get<std::string>()),
                 string_to_double(j[2].get<std::string>())};
}

}  // namespace

void save_measure(const AtomicMeasure& mu, const std::string& path) {
    write_file(path, measure_to_json(mu) + "\n");
}

AtomicMeasure load_measure(const std::string& path) {
    return measure_from_json(read_file(path));
}

std::string tree_to_json(const CantorTree& tree) {
    json j;
    const CantorParams& p = tree.params;
    j["params"] = {{"N", p.N},
                   {"eps", double_to_string(p.eps)},
                   {"M", double_to_string(p.M)},
                   {"delta", double_to_string(p.delta)},
                   {"Delta", double_to_string(p.Delta)},
                   {"gamma", double_to_string(p.gamma)},
                   {"q", p.q},
                   {"k_cap", p.k_cap}};
    json levels = json::array();
    for (const auto& level : tree.levels) {
        json cells = json::array();
        for (const Cell& c : level) {
            cells.push_back({{"level", c.level},
                             {"atoms", c.atoms},
                             {"etilde", c.etilde},
                             {"center", point_to_json(c.bottom.center)},
                             {"radius", double_to_string(c.bottom.radius)},
                             {"halo", double_to_string(c.halo)},
                             {"parent", c.parent},
                             {"top_index", c.top_index}});
        }
        levels.push_back(std::move(cells));
    }
    j["levels"] = std::move(levels);
    json covers = json::array();
    for (const auto& cover : tree.covers) {
        json balls = json::array();
        for (const TopCoverBall& b : cover)
            balls.push_back({{"z", point_to_json(b.z)},
                             {"r", double_to_string(b.r)},
                             {"atom_index", b.atom_index}});
        covers.push_back(std::move(balls));
    }
    j["covers"] = std::move(covers);
    j["support"] = tree.support;
    json weights = json::array();
    for (double w : tree.mu_prime_w) weights.push_back(double_to_string(w));
    j["mu_prime_w"] = std::move(weights);
    j["retained_fraction"] = double_to_string(tree.retained_fraction);
    return j.dump(2);
}

CantorTree tree_from_json(const std::string& text, const AtomicMeasure& mu) {
    json j = json::parse(text);
    CantorTree tree;
    tree.mu = &mu;
    const json& p = j.at("params");
    tree.params.N = p.at("N").get<int>();
    tree.params.eps = string_to_double(p.at("eps").get<std::string>());
    tree.params.M = string_to_double(p.at("M").get<std::string>());
    tree.params.delta = string_to_double(p.at("delta").get<std::string>());
    tree.params.Delta = string_to_double(p.at("Delta").get<std::string>());
    tree.params.gamma = string_to_double(p.at("gamma").get<std::string>());
    tree.params.q = p.at("q").get<int>();
    tree.params.k_cap = p.at("k_cap").get<int>();

    for (const auto& level : j.at("levels")) {
        std::vector<Cell> cells;
        for (const auto& cj : level) {
            Cell c;
            c.level = cj.at("level").get<int>();
            c.atoms = cj.at("atoms").get<std::vector<std::size_t>>();
            c.etilde = cj.at("etilde").get<std::vector<std::size_t>>();
            c.bottom.center = point_from_json(cj.at("center"));
            c.bottom.radius = string_to_double(cj.at("radius").get<std::string>());
            c.halo = string_to_double(cj.at("halo").get<std::string>());
            c.parent = cj.at("parent").get<int>();
            c.top_index = cj.at("top_index").get<int>();
            cells.push_back(std::move(c));
        }
        tree.levels.push_back(std::move(cells));
    }
    for (const auto& cover : j.at("covers")) {
        std::vector<TopCoverBall> balls;
        for (const auto& bj : cover) {
            TopCoverBall b;
            b.z = point_from_json(bj.at("z"));
            b.r = string_to_double(bj.at("r").get<std::string>());
            b.atom_index = bj.at("atom_index").get<std::size_t>();
            balls.push_back(b);
        }
        tree.covers.push_back(std::move(balls));
    }
    tree.support = j.at("support").get<std::vector<std::size_t>>();
    for (const auto& w : j.at("mu_prime_w"))
        tree.mu_prime_w.push_back(string_to_double(w.get<std::string>()));
    tree.retained_fraction = string_to_double(j.at("retained_fraction").get<std::string>());
    return tree;
}

void save_tree(const CantorTree& tree, const std::string& path) {
    write_file(path, tree_to_json(tree) + "\n");
}

CantorTree load_tree(const std::string& path, const AtomicMeasure& mu) {
    return tree_from_json(read_file(path), mu);
}

}  // namespace rw
