#pragma once

#include <string>
#include <vector>

#include "isoslope/io.hpp"

namespace isoslope {

// Structured, diffable run report.  render() is canonical and byte-stable;
// the walltime line is emitted last and excluded by render(false).
struct Report {
    std::string command;
    std::string digest;    // FNV-1a of the input bytes
    bool ok = true;        // false = diagnostic outcome
    std::vector<std::pair<std::string, std::string>> payload;
    long long walltime_ms = 0;

    void add(const std::string& k, const std::string& v) { payload.emplace_back(k, v); }
    std::string render(bool with_walltime = true) const;
};

std::string fnv1a_digest(const std::string& bytes);

// cmd in {slopes, ascend, descend, dwork, split, factorize, descend-morphism,
// descend-omega, unipotent, verify}.  Throws Error for usage/parse problems;
// math failures come back as ok=false diagnostics.
Report run_command(const std::string& cmd, const CrystalFile& cf, const std::string& input_bytes,
                   int t_prec);

struct CorpusResult {
    std::vector<std::pair<std::string, Report>> reports; // (file, report), name-sorted
    bool ok = true;
    std::string render() const;
};

CorpusResult run_corpus(const std::string& dir, int jobs);

} // namespace isoslope
