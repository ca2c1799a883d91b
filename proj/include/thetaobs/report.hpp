#pragma once

// Versioned deterministic reports ("thetaobs-report v1").  A report is a
// sorted list of per-check records; rendering is byte-stable for a fixed
// command and seed.  Wall-clock timings go to a separate sink (stderr in
// the CLI) so the report artifact itself stays reproducible.

#include <cstdint>
#include <string>
#include <vector>

namespace thetaobs::report {

struct Record {
    std::string name;    // check identifier, unique within a report
    std::string anchor;  // short provenance tag
    std::string verdict; // "pass", "fail", or "recorded:<value>"
    std::string witness; // digest or short value; "-" when absent
};

// FNV-1a 64-bit over a canonical byte string; used for witness digests.
uint64_t digest64(const std::string &bytes);
std::string digest_hex(const std::string &bytes);

class Report {
  public:
    Report(std::string command, uint64_t seed);

    void add(Record r);
    void add(const std::string &name, const std::string &anchor, bool pass,
             const std::string &witness = "-");
    void add_recorded(const std::string &name, const std::string &anchor,
                      const std::string &value,
                      const std::string &witness = "-");

    bool all_passed() const;
    size_t size() const { return records_.size(); }

    // Deterministic rendering: records sorted by name.
    std::string render() const;

  private:
    std::string command_;
    uint64_t seed_;
    std::vector<Record> records_;
};

} // namespace thetaobs::report
