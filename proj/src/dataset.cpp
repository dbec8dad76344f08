#include "longmix/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "nlohmann/json.hpp"

namespace longmix {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double Subject::covariate(const std::string& name) const {
    auto it = covariates.find(name);
    if (it == covariates.end())
        fail("subject '" + id + "' has no covariate '" + name + "'");
    return it->second;
}

LongitudinalDataset::LongitudinalDataset(std::vector<Subject> subjects,
                                         double horizon)
    : subjects_(std::move(subjects)), horizon_(horizon) {
    if (subjects_.empty()) fail("dataset must contain at least one subject");
    for (const auto& s : subjects_) {
        if (s.observations.empty())
            fail("subject '" + s.id + "' has no observations");
        double prev = -std::numeric_limits<double>::infinity();
        for (const auto& o : s.observations) {
            if (!std::isfinite(o.time) || !std::isfinite(o.outcome))
                fail("subject '" + s.id + "' has a non-finite value");
            if (o.time > 0.0)
                fail("subject '" + s.id + "': time " + format_double(o.time) +
                     " is after the terminal event");
            if (o.time < -horizon_)
                fail("subject '" + s.id + "': time " + format_double(o.time) +
                     " precedes the horizon of " + format_double(horizon_) +
                     " years");
            if (o.time == prev)
                fail("subject '" + s.id + "': duplicate time " +
                     format_double(o.time));
            if (o.time < prev)
                fail("subject '" + s.id + "': observations not sorted");
            prev = o.time;
        }
    }
    // Covariate registry from the first subject; all others must agree.
    for (const auto& [name, value] : subjects_.front().covariates) {
        (void)value;
        covariate_names_.push_back(name);
        centering_offsets_[name] = 0.0;
    }
    for (const auto& s : subjects_) {
        if (s.covariates.size() != covariate_names_.size())
            fail("subject '" + s.id + "' has an inconsistent covariate set");
        for (const auto& name : covariate_names_) {
            auto it = s.covariates.find(name);
            if (it == s.covariates.end())
                fail("subject '" + s.id + "' is missing covariate '" + name + "'");
            if (!std::isfinite(it->second))
                fail("subject '" + s.id + "': covariate '" + name +
                     "' is not finite");
        }
    }
}

long LongitudinalDataset::total_observations() const {
    long n = 0;
    for (const auto& s : subjects_) n += s.n_obs();
    return n;
}

bool LongitudinalDataset::has_covariate(const std::string& name) const {
    return std::find(covariate_names_.begin(), covariate_names_.end(), name) !=
           covariate_names_.end();
}

std::vector<double> LongitudinalDataset::pooled_times() const {
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(total_observations()));
    for (const auto& s : subjects_)
        for (const auto& o : s.observations) t.push_back(o.time);
    std::sort(t.begin(), t.end());
    return t;
}

LoadResult load_dataset(std::istream& in, const LoadOptions& opts) {
    std::string line;
    if (!std::getline(in, line)) fail("empty input: no header row");
    const auto header = split_csv_line(line);

    int col_subject = -1, col_time = -1, col_outcome = -1;
    std::vector<std::pair<int, std::string>> covariate_cols;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        const std::string name = trim(header[i]);
        if (name == opts.subject_column)
            col_subject = i;
        else if (name == opts.time_column)
            col_time = i;
        else if (name == opts.outcome_column)
            col_outcome = i;
        else if (!name.empty())
            covariate_cols.emplace_back(i, name);
    }
    if (col_subject < 0) fail("missing column '" + opts.subject_column + "'");
    if (col_time < 0) fail("missing column '" + opts.time_column + "'");
    if (col_outcome < 0) fail("missing column '" + opts.outcome_column + "'");

    struct Group {
        Subject subject;
        bool covariates_set = false;
    };
    std::unordered_map<std::string, std::size_t> index;
    std::vector<Group> groups;
    int dropped = 0;
    long row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            fail("row " + std::to_string(row) + ": expected " +
                 std::to_string(header.size()) + " cells, found " +
                 std::to_string(cells.size()));

        const std::string id = trim(cells[col_subject]);
        if (id.empty()) fail("row " + std::to_string(row) + ": empty subject id");

        const auto time = parse_double(cells[col_time]);
        if (!time)
            fail("row " + std::to_string(row) + ": non-numeric time '" +
                 trim(cells[col_time]) + "'");
        if (*time > 0.0)
            fail("row " + std::to_string(row) + ": time " +
                 format_double(*time) + " is after the terminal event");

        const std::string outcome_cell = trim(cells[col_outcome]);
        std::optional<double> outcome;
        if (outcome_cell.empty()) {
            ++dropped;
        } else {
            outcome = parse_double(outcome_cell);
            if (!outcome)
                fail("row " + std::to_string(row) + ": non-numeric outcome '" +
                     outcome_cell + "'");
        }

        auto [it, inserted] = index.emplace(id, groups.size());
        if (inserted) {
            groups.push_back({});
            groups.back().subject.id = id;
        }
        Group& g = groups[it->second];

        for (const auto& [col, name] : covariate_cols) {
            const auto v = parse_double(cells[col]);
            if (!v)
                fail("row " + std::to_string(row) + ": non-numeric value for '" +
                     name + "'");
            if (!g.covariates_set) {
                g.subject.covariates[name] = *v;
            } else if (g.subject.covariates[name] != *v) {
                fail("row " + std::to_string(row) + ": covariate '" + name +
                     "' varies within subject '" + id + "'");
            }
        }
        g.covariates_set = true;

        if (outcome) g.subject.observations.push_back({*time, *outcome});
    }

    std::vector<Subject> subjects;
    subjects.reserve(groups.size());
    for (auto& g : groups) {
        auto& obs = g.subject.observations;
        std::sort(obs.begin(), obs.end(),
                  [](const Observation& a, const Observation& b) {
                      return a.time < b.time;
                  });
        for (std::size_t j = 1; j < obs.size(); ++j)
            if (obs[j].time == obs[j - 1].time)
                fail("subject '" + g.subject.id + "': duplicate time " +
                     format_double(obs[j].time));
        if (!obs.empty()) subjects.push_back(std::move(g.subject));
    }
    if (subjects.empty()) fail("no usable rows in input");

    return {LongitudinalDataset(std::move(subjects), opts.horizon), dropped};
}

LoadResult load_dataset_file(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    return load_dataset(in, opts);
}

LongitudinalDataset center_covariates(const LongitudinalDataset& ds,
                                      const std::map<std::string, double>& centers) {
    for (const auto& [name, c] : centers) {
        (void)c;
        if (!ds.has_covariate(name)) fail("unknown covariate '" + name + "'");
    }
    LongitudinalDataset out = ds;
    for (auto& s : out.subjects_)
        for (const auto& [name, c] : centers) s.covariates[name] -= c;
    for (const auto& [name, c] : centers) out.centering_offsets_[name] += c;
    return out;
}

DatasetSummary summarize(const LongitudinalDataset& ds) {
    DatasetSummary s;
    s.n_subjects = ds.n_subjects();
    s.n_observations = ds.total_observations();

    double fu_sum = 0.0, fu_sq = 0.0;
    for (const auto& subj : ds.subjects()) {
        const double f = subj.follow_up();
        fu_sum += f;
        fu_sq += f * f;
    }
    const double n = static_cast<double>(s.n_subjects);
    s.follow_up_mean = fu_sum / n;
    s.follow_up_sd =
        n > 1 ? std::sqrt(std::max(0.0, (fu_sq - fu_sum * fu_sum / n) / (n - 1)))
              : 0.0;
    s.obs_per_subject_mean = static_cast<double>(s.n_observations) / n;

    for (const auto& name : ds.covariate_names()) {
        double sum = 0.0, sq = 0.0;
        for (const auto& subj : ds.subjects()) {
            const double v = subj.covariates.at(name);
            sum += v;
            sq += v * v;
        }
        CovariateSummary c;
        c.name = name;
        c.mean = sum / n;
        c.sd = n > 1
                   ? std::sqrt(std::max(0.0, (sq - sum * sum / n) / (n - 1)))
                   : 0.0;
        s.covariates.push_back(c);
    }
    return s;
}

void write_csv(const LongitudinalDataset& ds, std::ostream& out) {
    out << "subject_id,time,outcome";
    for (const auto& name : ds.covariate_names()) out << ',' << name;
    out << '\n';
    for (const auto& s : ds.subjects()) {
        for (const auto& o : s.observations) {
            out << s.id << ',' << format_double(o.time) << ','
                << format_double(o.outcome);
            for (const auto& name : ds.covariate_names())
                out << ',' << format_double(s.covariates.at(name));
            out << '\n';
        }
    }
}

std::string to_csv(const LongitudinalDataset& ds) {
    std::ostringstream os;
    write_csv(ds, os);
    return os.str();
}

std::string to_json(const LongitudinalDataset& ds) {
    nlohmann::ordered_json root;
    root["n_subjects"] = ds.n_subjects();
    root["n_observations"] = ds.total_observations();
    root["covariates"] = ds.covariate_names();
    root["centering_offsets"] = ds.centering_offsets();
    auto& subjects = root["subjects"] = nlohmann::ordered_json::array();
    for (const auto& s : ds.subjects()) {
        nlohmann::ordered_json j;
        j["id"] = s.id;
        auto& obs = j["observations"] = nlohmann::ordered_json::array();
        for (const auto& o : s.observations)
            obs.push_back({{"time", o.time}, {"outcome", o.outcome}});
        j["covariates"] = s.covariates;
        subjects.push_back(std::move(j));
    }
    return root.dump(2);
}

std::string format_summary(const DatasetSummary& s) {
    std::ostringstream os;
    os << "subjects: " << s.n_subjects << "\n"
       << "observations: " << s.n_observations << "\n"
       << "obs per subject (mean): " << s.obs_per_subject_mean << "\n"
       << "follow-up years (mean, sd): " << s.follow_up_mean << ", "
       << s.follow_up_sd << "\n";
    for (const auto& c : s.covariates)
        os << "covariate " << c.name << " (mean, sd): " << c.mean << ", "
           << c.sd << "\n";
    return os.str();
}

}  // namespace longmix
