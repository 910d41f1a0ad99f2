/*
 * tsti — command-line front end for the TST-index.
 *
 * Subcommands: build, query, edit, stats, bench, gen.
 * Patterns and edit payloads accept \xNN escapes for arbitrary bytes.
 * Exit codes: 0 success, 1 usage error, 2 data error.
 */

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsti/index.hpp"
#include "tsti/oracle.hpp"

namespace {

using namespace tsti;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

// \xNN escapes for arbitrary bytes; \\ for a literal backslash.
std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (i + 1 < s.size() && s[i + 1] == '\\') {
            out.push_back('\\');
            ++i;
        } else if (i + 3 < s.size() && s[i + 1] == 'x') {
            out.push_back(static_cast<char>(std::stoi(s.substr(i + 2, 2), nullptr, 16)));
            i += 3;
        } else {
            throw std::runtime_error("bad escape in: " + s);
        }
    }
    return out;
}

double mean_us(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0 : s / v.size();
}

int cmd_build(const std::string& input, std::size_t q, std::uint64_t m,
              const std::string& output) {
    std::string raw = read_file(input);
    Text t = Text::from_raw(raw);
    auto t0 = std::chrono::steady_clock::now();
    TstIndex idx = TstIndex::build(t, q, m);
    auto t1 = std::chrono::steady_clock::now();
    idx.save_file(output);
    IndexStats s = idx.stats();
    std::size_t z = lz77(t).size();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    std::cout << "N=" << s.text_len << " z=" << z << " w'=" << s.grammar_rules
              << " qgrams=" << s.qgram_count << " build_s=" << secs
              << " bytes=" << s.serialized_bytes << "\n";
    return 0;
}

int cmd_query(const std::string& index_path, const std::string& mode,
              const std::string& pattern, std::size_t at, std::size_t len) {
    TstIndex idx = TstIndex::load_file(index_path);
    if (mode == "count") {
        std::cout << idx.count(Pattern(unescape(pattern))) << "\n";
    } else if (mode == "locate") {
        for (std::size_t p : idx.locate(Pattern(unescape(pattern)))) std::cout << p << "\n";
    } else if (mode == "extract") {
        std::cout << idx.extract(at, len);
    } else {
        throw std::runtime_error("unknown query mode: " + mode);
    }
    return 0;
}

int cmd_edit(const std::string& index_path, const std::string& op, std::size_t position,
             const std::string& payload, std::size_t del_len) {
    TstIndex idx = TstIndex::load_file(index_path);
    if (op == "insert") {
        idx.insert(position, unescape(payload));
    } else if (op == "delete") {
        idx.erase(position, del_len);
    } else {
        throw std::runtime_error("unknown edit op: " + op);
    }
    // write-temp-rename so a failure never clobbers the old file
    std::string tmp = index_path + ".tmp";
    idx.save_file(tmp);
    if (std::rename(tmp.c_str(), index_path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + index_path);
    return 0;
}

int cmd_stats(const std::string& index_path) {
    TstIndex idx = TstIndex::load_file(index_path);
    IndexStats s = idx.stats();
    std::cout << "N=" << s.text_len << "\nq=" << s.q << "\nM=" << s.capacity_m
              << "\nalphabet=" << s.alphabet << "\nqgrams=" << s.qgram_count
              << "\ntrie_nodes=" << s.trie_nodes << "\ngrammar_rules=" << s.grammar_rules
              << "\ngrammar_height=" << s.grammar_height
              << "\nbytes=" << s.serialized_bytes << "\n";
    return 0;
}

int cmd_bench(const std::string& input, std::vector<std::size_t> qs,
              std::vector<std::size_t> ms, std::size_t samples, std::uint64_t seed) {
    std::string raw = read_file(input);
    Text t = Text::from_raw(raw);
    std::mt19937_64 rng(seed);
    std::cout << "q,m,count_us,locate_us,occ,index_bytes\n";
    for (std::size_t q : qs) {
        TstIndex idx = TstIndex::build(t, q, 1ull << 22);
        std::size_t bytes = idx.serialize().size();
        for (std::size_t m : ms) {
            if (m > raw.size()) continue;
            std::vector<Pattern> pats;
            std::uniform_int_distribution<std::size_t> pos(0, raw.size() - m);
            for (std::size_t s = 0; s < samples; ++s)
                pats.emplace_back(std::string(raw.substr(pos(rng), m)));
            for (std::size_t w = 0; w < 10 && w < pats.size(); ++w)
                idx.count(pats[w]);  // warm-up
            std::vector<double> ct, lt;
            std::size_t occ = 0;
            for (const Pattern& p : pats) {
                auto a = std::chrono::steady_clock::now();
                idx.count(p);
                auto b = std::chrono::steady_clock::now();
                auto res = idx.locate(p);
                auto c = std::chrono::steady_clock::now();
                ct.push_back(std::chrono::duration<double, std::micro>(b - a).count());
                lt.push_back(std::chrono::duration<double, std::micro>(c - b).count());
                occ += res.size();
            }
            std::cout << q << "," << m << "," << mean_us(ct) << "," << mean_us(lt) << ","
                      << occ << "," << bytes << "\n";
        }
    }
    return 0;
}

int cmd_gen(std::size_t base_len, std::size_t copies, double mutation, std::uint64_t seed,
            const std::string& alphabet, const std::string& output) {
    Text t = gen_repetitive(base_len, copies, mutation, seed, alphabet);
    write_file(output, std::string(t.raw()));
    std::cout << "wrote " << t.raw().size() << " bytes to " << output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TST-index: compressed dynamic self-index for repetitive texts"};
    app.require_subcommand(1);

    std::string input, output, index_path, mode, pattern, payload, op;
    std::string alphabet = "ab";
    std::size_t q = 8, position = 1, at = 1, len = 0, del_len = 0;
    std::size_t base_len = 1000, copies = 100, samples = 100;
    std::uint64_t m = 1ull << 22, seed = 1;
    double mutation = 0.001;
    std::vector<std::size_t> qs{4, 8, 16}, mlens{4, 8, 16, 32, 64};

    auto* b = app.add_subcommand("build", "build an index from a text file");
    b->add_option("input", input)->required();
    b->add_option("-o,--output", output)->required();
    b->add_option("-q", q, "window length (>= 2)");
    b->add_option("-M", m, "capacity parameter (variable budget 4M)");

    auto* qu = app.add_subcommand("query", "count / locate / extract");
    qu->add_option("index", index_path)->required();
    qu->add_option("mode", mode, "count|locate|extract")->required();
    qu->add_option("-p,--pattern", pattern, "pattern (\\xNN escapes allowed)");
    qu->add_option("--at", at, "extract start (1-based)");
    qu->add_option("--len", len, "extract length");

    auto* ed = app.add_subcommand("edit", "insert or delete");
    ed->add_option("index", index_path)->required();
    ed->add_option("op", op, "insert|delete")->required();
    ed->add_option("-i,--position", position)->required();
    ed->add_option("-p,--payload", payload, "insert payload (\\xNN escapes allowed)");
    ed->add_option("-k,--length", del_len, "delete length");

    auto* st = app.add_subcommand("stats", "print index statistics");
    st->add_option("index", index_path)->required();

    auto* be = app.add_subcommand("bench", "query benchmark, CSV to stdout");
    be->add_option("input", input)->required();
    be->add_option("--q-list", qs);
    be->add_option("--m-list", mlens);
    be->add_option("--samples", samples);
    be->add_option("--seed", seed);

    auto* ge = app.add_subcommand("gen", "generate a repetitive test text");
    ge->add_option("-o,--output", output)->required();
    ge->add_option("--base-len", base_len);
    ge->add_option("--copies", copies);
    ge->add_option("--mutation", mutation);
    ge->add_option("--seed", seed);
    ge->add_option("--alphabet", alphabet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;  // 0 for --help, 1 for usage errors
    }

    try {
        if (b->parsed()) return cmd_build(input, q, m, output);
        if (qu->parsed()) return cmd_query(index_path, mode, pattern, at, len);
        if (ed->parsed()) return cmd_edit(index_path, op, position, payload, del_len);
        if (st->parsed()) return cmd_stats(index_path);
        if (be->parsed()) return cmd_bench(input, qs, mlens, samples, seed);
        if (ge->parsed()) return cmd_gen(base_len, copies, mutation, seed, alphabet, output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
