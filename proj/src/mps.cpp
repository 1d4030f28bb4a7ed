#include "eamod/mps.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"

namespace eamod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string row_tag(int r) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "R%07d", r + 1);
    return buf;
}

std::string col_tag(int j) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "C%07d", j + 1);
    return buf;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

double parse_value(const std::string& tok, const std::string& file, std::size_t lineno) {
    return csv_double(tok, file, lineno);
}

}  // namespace

void write_mps(const MilpModel& model, const std::string& path) {
    if (!model.finalized()) throw InvalidDimension("write_mps: model must be finalized");
    std::ofstream out(path);
    if (!out) throw IoError("write_mps: cannot open " + path);

    char buf[160];
    out << "NAME          FLEET\n";
    out << "ROWS\n";
    out << " N  COST\n";
    for (int r = 0; r < model.n_rows(); ++r) {
        const char s = model.row(r).sense == RowSense::LE   ? 'L'
                       : model.row(r).sense == RowSense::GE ? 'G'
                                                            : 'E';
        std::snprintf(buf, sizeof(buf), " %c  %s\n", s, row_tag(r).c_str());
        out << buf;
    }

    // Column-major coefficients: transpose the row-wise storage.
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(model.n_vars()));
    for (int r = 0; r < model.n_rows(); ++r)
        for (const auto* e = model.row_begin(r); e != model.row_end(r); ++e)
            cols[static_cast<std::size_t>(e->var)].emplace_back(r, e->coeff);

    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (int j = 0; j < model.n_vars(); ++j) {
        const ModelVar& v = model.var(j);
        const bool want_int = v.kind == VarKind::Binary;
        if (want_int != in_int) {
            std::snprintf(buf, sizeof(buf), "    MK%06d  'MARKER'                 '%s'\n", ++marker,
                          want_int ? "INTORG" : "INTEND");
            out << buf;
            in_int = want_int;
        }
        // Objective entry always present so every variable is declared here,
        // keeping the import order identical to the export order.
        std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %s\n", col_tag(j).c_str(), "COST",
                      format_double(v.objective).c_str());
        out << buf;
        for (const auto& [r, coeff] : cols[static_cast<std::size_t>(j)]) {
            std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %s\n", col_tag(j).c_str(),
                          row_tag(r).c_str(), format_double(coeff).c_str());
            out << buf;
        }
    }
    if (in_int) {
        std::snprintf(buf, sizeof(buf), "    MK%06d  'MARKER'                 'INTEND'\n", ++marker);
        out << buf;
    }

    out << "RHS\n";
    for (int r = 0; r < model.n_rows(); ++r) {
        if (model.row(r).rhs == 0.0) continue;
        std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %s\n", "RHS", row_tag(r).c_str(),
                      format_double(model.row(r).rhs).c_str());
        out << buf;
    }

    out << "BOUNDS\n";
    for (int j = 0; j < model.n_vars(); ++j) {
        const ModelVar& v = model.var(j);
        const std::string tag = col_tag(j);
        if (v.lower == v.upper) {
            std::snprintf(buf, sizeof(buf), " FX %-8s  %-8s  %s\n", "BND", tag.c_str(),
                          format_double(v.lower).c_str());
            out << buf;
            continue;
        }
        if (v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0) {
            std::snprintf(buf, sizeof(buf), " BV %-8s  %-8s\n", "BND", tag.c_str());
            out << buf;
            continue;
        }
        if (v.lower != 0.0) {
            if (std::isfinite(v.lower))
                std::snprintf(buf, sizeof(buf), " LO %-8s  %-8s  %s\n", "BND", tag.c_str(),
                              format_double(v.lower).c_str());
            else
                std::snprintf(buf, sizeof(buf), " MI %-8s  %-8s\n", "BND", tag.c_str());
            out << buf;
        }
        if (std::isfinite(v.upper)) {
            std::snprintf(buf, sizeof(buf), " UP %-8s  %-8s  %s\n", "BND", tag.c_str(),
                          format_double(v.upper).c_str());
            out << buf;
        }
    }
    out << "ENDATA\n";
    if (!out) throw IoError("write_mps: failed writing " + path);
    out.close();

    nlohmann::json names;
    for (int r = 0; r < model.n_rows(); ++r) names["rows"][row_tag(r)] = model.row(r).name;
    for (int j = 0; j < model.n_vars(); ++j) names["cols"][col_tag(j)] = model.var(j).name;
    names["objective"] = "COST";
    std::ofstream side(path + ".names.json");
    if (!side) throw IoError("write_mps: cannot open " + path + ".names.json");
    side << names.dump(2) << "\n";
}

MilpModel read_mps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_mps: cannot open " + path);

    MilpModel model;
    std::map<std::string, int> row_of;
    std::map<std::string, int> col_of;
    std::vector<bool> integer_col;
    std::string obj_name;
    bool have_obj = false;
    bool in_int = false;
    enum class Section { None, Name, Rows, Columns, Rhs, Bounds, Done };
    Section section = Section::None;

    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) -> ParseError { return ParseError(path, lineno, what); };

    auto get_col = [&](const std::string& name) {
        auto it = col_of.find(name);
        if (it == col_of.end()) throw fail("unknown column " + name);
        return it->second;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        const std::vector<std::string> f = tokens(line);
        if (f.empty()) continue;

        if (!std::isspace(static_cast<unsigned char>(line[0]))) {
            const std::string& kw = f[0];
            if (kw == "NAME") section = Section::Name;
            else if (kw == "ROWS") section = Section::Rows;
            else if (kw == "COLUMNS") section = Section::Columns;
            else if (kw == "RHS") section = Section::Rhs;
            else if (kw == "BOUNDS") section = Section::Bounds;
            else if (kw == "ENDATA") { section = Section::Done; break; }
            else if (kw == "RANGES") throw fail("RANGES section is not supported");
            else throw fail("unsupported section " + kw);
            continue;
        }

        switch (section) {
            case Section::Rows: {
                if (f.size() != 2) throw fail("ROWS line needs sense and name");
                const std::string& sense = f[0];
                const std::string& name = f[1];
                if (sense == "N") {
                    if (have_obj) throw fail("second objective row " + name);
                    obj_name = name;
                    have_obj = true;
                } else if (sense == "L" || sense == "G" || sense == "E") {
                    if (row_of.count(name)) throw fail("duplicate row " + name);
                    const RowSense rs = sense == "L"   ? RowSense::LE
                                        : sense == "G" ? RowSense::GE
                                                       : RowSense::EQ;
                    row_of[name] = model.add_row({name, rs, 0.0, "imported"});
                } else {
                    throw fail("unknown row sense " + sense);
                }
                break;
            }
            case Section::Columns: {
                if (f.size() >= 3 && f[1] == "'MARKER'") {
                    const std::string& mk = f.back();
                    if (mk == "'INTORG'") in_int = true;
                    else if (mk == "'INTEND'") in_int = false;
                    else throw fail("unknown marker " + mk);
                    break;
                }
                if (f.size() != 3 && f.size() != 5) throw fail("COLUMNS line needs 1 or 2 entries");
                const std::string& cname = f[0];
                if (!col_of.count(cname)) {
                    col_of[cname] = model.add_var(
                        {cname, in_int ? VarKind::Binary : VarKind::Continuous,
                         0.0, in_int ? 1.0 : kInf, 0.0, {}});
                    integer_col.push_back(in_int);
                }
                const int j = col_of[cname];
                for (std::size_t t = 1; t + 1 < f.size(); t += 2) {
                    const std::string& rname = f[t];
                    const double value = parse_value(f[t + 1], path, lineno);
                    if (have_obj && rname == obj_name) {
                        model.set_var_objective(j, model.var(j).objective + value);
                    } else {
                        auto it = row_of.find(rname);
                        if (it == row_of.end()) throw fail("unknown row " + rname);
                        model.add_coeff(it->second, j, value);
                    }
                }
                break;
            }
            case Section::Rhs: {
                if (f.size() != 3 && f.size() != 5) throw fail("RHS line needs 1 or 2 entries");
                for (std::size_t t = 1; t + 1 < f.size(); t += 2) {
                    auto it = row_of.find(f[t]);
                    if (it == row_of.end()) throw fail("unknown row " + f[t]);
                    model.set_rhs(it->second, parse_value(f[t + 1], path, lineno));
                }
                break;
            }
            case Section::Bounds: {
                if (f.size() < 3) throw fail("BOUNDS line too short");
                const std::string& kind = f[0];
                const int j = get_col(f[2]);
                const ModelVar& v = model.var(j);
                if (kind == "UP") {
                    if (f.size() != 4) throw fail("UP bound needs a value");
                    model.set_var_bounds(j, v.lower, parse_value(f[3], path, lineno));
                } else if (kind == "LO") {
                    if (f.size() != 4) throw fail("LO bound needs a value");
                    model.set_var_bounds(j, parse_value(f[3], path, lineno), v.upper);
                } else if (kind == "FX") {
                    if (f.size() != 4) throw fail("FX bound needs a value");
                    const double val = parse_value(f[3], path, lineno);
                    model.set_var_bounds(j, val, val);
                } else if (kind == "BV") {
                    model.set_var_bounds(j, 0.0, 1.0);
                    model.set_var_kind(j, VarKind::Binary);
                } else if (kind == "MI") {
                    model.set_var_bounds(j, -kInf, v.upper);
                } else if (kind == "PL") {
                    model.set_var_bounds(j, v.lower, kInf);
                } else {
                    throw fail("unsupported bound type " + kind);
                }
                break;
            }
            case Section::Name:
                break;
            default:
                throw fail("data line outside any section");
        }
    }
    if (section != Section::Done) throw ParseError(path, lineno, "missing ENDATA");
    if (!have_obj) throw ParseError(path, lineno, "missing objective row");

    for (const auto& [name, j] : col_of) {
        if (!integer_col[static_cast<std::size_t>(j)] && model.var(j).kind != VarKind::Binary)
            continue;
        const ModelVar& v = model.var(j);
        const bool binaryish =
            (v.lower == 0.0 && v.upper == 1.0) || (v.lower == v.upper && (v.lower == 0.0 || v.lower == 1.0));
        if (!binaryish)
            throw ParseError(path, 0, "integer column " + name + " is not binary-bounded");
        model.set_var_kind(j, VarKind::Binary);
    }

    std::ifstream side(path + ".names.json");
    if (side) {
        nlohmann::json names;
        try {
            side >> names;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ".names.json", 0, e.what());
        }
        if (names.contains("rows"))
            for (const auto& [tag, orig] : names["rows"].items()) {
                auto it = row_of.find(tag);
                if (it != row_of.end()) model.set_row_name(it->second, orig.get<std::string>());
            }
        if (names.contains("cols"))
            for (const auto& [tag, orig] : names["cols"].items()) {
                auto it = col_of.find(tag);
                if (it != col_of.end()) model.set_var_name(it->second, orig.get<std::string>());
            }
    }

    model.finalize();
    return model;
}

}  // namespace eamod
