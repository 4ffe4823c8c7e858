#pragma once

#include <stdexcept>
#include <string>

namespace sitewatch {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- raster_io ----

// Input is a TIFF but uses something outside the supported subset
// (unknown compression, planar multi-band, BigTIFF, ...).
class UnsupportedFeature : public Error {
public:
    UnsupportedFeature(const std::string& what, int tag_id)
        : Error("unsupported feature: " + what + " (tag " + std::to_string(tag_id) + ")"),
          tag_id_(tag_id) {}
    int tag_id() const { return tag_id_; }

private:
    int tag_id_;
};

// Truncated file, inconsistent offsets, out-of-range reads, bad sample data.
class MalformedFile : public Error {
public:
    explicit MalformedFile(const std::string& msg) : Error("malformed file: " + msg) {}
};

// No ModelPixelScale/ModelTiepoint tags.
class MissingGeoreference : public Error {
public:
    MissingGeoreference() : Error("missing georeference: no ModelPixelScale/ModelTiepoint tags") {}
};

// ---- record validation (sites, energy tables, configs) ----

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error("validation: " + msg) {}
    ValidationError(const std::string& record, const std::string& field, const std::string& msg)
        : Error("validation: " + record + ": " + field + ": " + msg),
          record_(record), field_(field) {}
    const std::string& record() const { return record_; }
    const std::string& field() const { return field_; }

private:
    std::string record_;
    std::string field_;
};

// ---- indices / zonal statistics ----

class GridMismatch : public Error {
public:
    explicit GridMismatch(const std::string& msg) : Error("grid mismatch: " + msg) {}
};

class EmptyMask : public Error {
public:
    EmptyMask() : Error("empty mask: no selected non-nodata pixels") {}
};

// ---- timeseries ----

class InsufficientData : public Error {
public:
    InsufficientData(const std::string& what, std::size_t n_obs, std::size_t n_needed)
        : Error("insufficient data for " + what + ": have " + std::to_string(n_obs) +
                " observations, need " + std::to_string(n_needed)) {}
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(double condition)
        : Error("rank-deficient design matrix (condition estimate " +
                std::to_string(condition) + ")"),
          condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

class DegenerateAbscissa : public Error {
public:
    DegenerateAbscissa() : Error("degenerate abscissa: all observation times identical") {}
};

class MissingYear : public Error {
public:
    explicit MissingYear(int year)
        : Error("no annual value for year " + std::to_string(year)), year_(year) {}
    int year() const { return year_; }

private:
    int year_;
};

class NonpositiveBaseline : public Error {
public:
    explicit NonpositiveBaseline(double value)
        : Error("baseline value must be positive, got " + std::to_string(value)) {}
};

// ---- energy ----

class NoMatches : public Error {
public:
    NoMatches() : Error("no site matched a zone intensity record") {}
};

// ---- report ----

class NoAnalyses : public Error {
public:
    NoAnalyses() : Error("a report needs at least one analysis section") {}
};

class EmptySeries : public Error {
public:
    EmptySeries() : Error("series has no observations") {}
};

// ---- I/O ----

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& msg)
        : Error("io: " + path + ": " + msg), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

} // namespace sitewatch
