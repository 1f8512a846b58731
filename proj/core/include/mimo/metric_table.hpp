#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mimo {

/// n samples x m organs of Dice, Hausdorff distance (mm, +inf allowed) and
/// confidence. Storage is row-major: cell (sample, organ).
class MetricTable {
public:
    MetricTable() = default;
    MetricTable(std::vector<std::string> sample_ids, std::vector<std::string> organs);

    std::size_t sample_count() const { return sample_ids_.size(); }
    std::size_t organ_count() const { return organs_.size(); }

    const std::vector<std::string>& sample_ids() const { return sample_ids_; }
    const std::vector<std::string>& organs() const { return organs_; }

    double& dice(std::size_t sample, std::size_t organ) { return dice_[cell(sample, organ)]; }
    double& hd(std::size_t sample, std::size_t organ) { return hd_[cell(sample, organ)]; }
    double& conf(std::size_t sample, std::size_t organ) { return conf_[cell(sample, organ)]; }
    double dice(std::size_t sample, std::size_t organ) const { return dice_[cell(sample, organ)]; }
    double hd(std::size_t sample, std::size_t organ) const { return hd_[cell(sample, organ)]; }
    double conf(std::size_t sample, std::size_t organ) const { return conf_[cell(sample, organ)]; }

    std::vector<double> dice_column(std::size_t organ) const;
    std::vector<double> hd_column(std::size_t organ) const;
    std::vector<double> conf_column(std::size_t organ) const;

    /// New table holding the given rows, in the given order.
    MetricTable select_rows(std::span<const std::size_t> rows) const;

    /// Throws mimo::Error on duplicate labels or out-of-range values.
    void validate() const;

private:
    std::size_t cell(std::size_t sample, std::size_t organ) const { return sample * organs_.size() + organ; }
    std::vector<double> column(const std::vector<double>& values, std::size_t organ) const;

    std::vector<std::string> sample_ids_;
    std::vector<std::string> organs_;
    std::vector<double> dice_;
    std::vector<double> hd_;
    std::vector<double> conf_;
};

// CSV with header `sample_id,organ,dice,hd,conf`, one line per cell in
// sample-major order. Numbers use the shortest round-trip representation;
// infinite HD is the literal `inf`.
std::string format_number(double value);
void write_metric_csv(std::ostream& out, const MetricTable& table);
void write_metric_csv(const std::filesystem::path& path, const MetricTable& table);
MetricTable read_metric_csv(std::istream& in);
MetricTable read_metric_csv(const std::filesystem::path& path);

}  // namespace mimo
