#include "thetaobs/report.hpp"

#include <algorithm>
#include <sstream>

#include "thetaobs/error.hpp"

namespace thetaobs::report {

uint64_t digest64(const std::string &bytes)
{
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string digest_hex(const std::string &bytes)
{
    uint64_t h = digest64(bytes);
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Report::Report(std::string command, uint64_t seed)
    : command_(std::move(command)), seed_(seed)
{
}

void Report::add(Record r)
{
    for (const auto &have : records_)
        if (have.name == r.name)
            throw input_error("Report: duplicate record name " + r.name);
    records_.push_back(std::move(r));
}

void Report::add(const std::string &name, const std::string &anchor,
                 bool pass, const std::string &witness)
{
    add({name, anchor, pass ? "pass" : "fail", witness});
}

void Report::add_recorded(const std::string &name, const std::string &anchor,
                          const std::string &value,
                          const std::string &witness)
{
    add({name, anchor, "recorded:" + value, witness});
}

bool Report::all_passed() const
{
    for (const auto &r : records_)
        if (r.verdict == "fail")
            return false;
    return true;
}

std::string Report::render() const
{
    std::vector<Record> sorted = records_;
    std::sort(sorted.begin(), sorted.end(),
              [](const Record &a, const Record &b) { return a.name < b.name; });
    std::ostringstream out;
    out << "thetaobs-report v1\n";
    out << "command " << command_ << '\n';
    out << "seed " << seed_ << '\n';
    out << "checks " << sorted.size() << '\n';
    for (const auto &r : sorted)
        out << "check " << r.name << " anchor=" << r.anchor
            << " verdict=" << r.verdict << " witness=" << r.witness << '\n';
    out << "status " << (all_passed() ? "ok" : "failed") << '\n';
    return out.str();
}

} // namespace thetaobs::report
