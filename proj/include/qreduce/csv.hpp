#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "qreduce/diffusion.hpp"
#include "qreduce/errors.hpp"
#include "qreduce/fokker_planck.hpp"
#include "qreduce/quantum.hpp"
#include "qreduce/series.hpp"

namespace qreduce {

/// Line-buffered CSV writer with round-trip-exact float formatting.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) {
        file_ = std::fopen(path.string().c_str(), "wb");
        if (!file_)
            throw IoError("cannot open " + path.string() + " for writing");
    }

    ~CsvWriter() {
        if (file_) std::fclose(file_);
    }

    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::string& line) { raw(line); }

    void raw(const std::string& line) {
        std::fputs(line.c_str(), file_);
        std::fputc('\n', file_);
    }

    void field(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        sep();
        std::fputs(buf, file_);
    }

    void field(std::uint64_t v) {
        sep();
        std::fprintf(file_, "%llu", static_cast<unsigned long long>(v));
    }

    void field(long long v) {
        sep();
        std::fprintf(file_, "%lld", v);
    }

    void end_row() {
        std::fputc('\n', file_);
        row_open_ = false;
    }

private:
    void sep() {
        if (row_open_) std::fputc(',', file_);
        row_open_ = true;
    }

    std::FILE* file_ = nullptr;
    bool row_open_ = false;
};

/// trajectory_id,winner,hitting_time,steps -- winner is 1-based, 0 = timeout.
inline void write_trajectories_csv(const std::filesystem::path& path,
                                   const std::vector<AbsorptionRecord>& records) {
    CsvWriter csv(path);
    csv.header("trajectory_id,winner,hitting_time,steps");
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        csv.field(std::uint64_t(i));
        csv.field(std::uint64_t(rec.winner ? *rec.winner + 1 : 0));
        csv.field(rec.hitting_time);
        csv.field(rec.steps);
        csv.end_row();
    }
}

/// t,x,density for every recorded snapshot.
inline void write_fp_density_csv(const std::filesystem::path& path, const FpGrid& grid,
                                 const FpSolution& sol) {
    CsvWriter csv(path);
    csv.header("t,x,density");
    for (std::size_t s = 0; s < sol.times.size(); ++s) {
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            csv.field(sol.times[s]);
            csv.field(grid.x_center(i));
            csv.field(sol.density_history[s][i]);
            csv.end_row();
        }
    }
}

/// t,mass0,mass1 cumulative absorbed-mass series.
inline void write_fp_absorbed_csv(const std::filesystem::path& path, const FpSolution& sol) {
    CsvWriter csv(path);
    csv.header("t,mass0,mass1");
    for (std::size_t s = 0; s < sol.times.size(); ++s) {
        csv.field(sol.times[s]);
        csv.field(sol.absorbed_mass_0_history[s]);
        csv.field(sol.absorbed_mass_1_history[s]);
        csv.end_row();
    }
}

/// t,p1,p2,total_norm channel-norm series of a quantum run.
inline void write_norm_series_csv(const std::filesystem::path& path,
                                  const EvolveResult& result) {
    CsvWriter csv(path);
    csv.header("t,p1,p2,total_norm");
    for (std::size_t i = 0; i < result.series.n_samples(); ++i) {
        csv.field(result.series.time(i));
        csv.field(result.series.at(i, 0));
        csv.field(result.series.at(i, 1));
        csv.field(result.total_norm[i]);
        csv.end_row();
    }
}

/// x,re_phi1,im_phi1,re_phi2,im_phi2 for one state snapshot.
inline void write_snapshot_csv(const std::filesystem::path& path, const GridSpec& grid,
                               const TwoChannelState& state) {
    CsvWriter csv(path);
    csv.header("x,re_phi1,im_phi1,re_phi2,im_phi2");
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        csv.field(grid.x(i));
        csv.field(state.phi1()[i].real());
        csv.field(state.phi1()[i].imag());
        csv.field(state.phi2()[i].real());
        csv.field(state.phi2()[i].imag());
        csv.end_row();
    }
}

/// t,p1,...,pN for a generic sampled path.
inline void write_path_series_csv(const std::filesystem::path& path,
                                  const PathSeries& series) {
    CsvWriter csv(path);
    std::string head = "t";
    for (std::size_t j = 0; j < series.n_channels; ++j)
        head += ",p" + std::to_string(j + 1);
    csv.header(head);
    for (std::size_t i = 0; i < series.n_samples(); ++i) {
        csv.field(series.time(i));
        for (std::size_t j = 0; j < series.n_channels; ++j) csv.field(series.at(i, j));
        csv.end_row();
    }
}

} // namespace qreduce
