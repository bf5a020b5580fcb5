#pragma once
#include <string>

#include "eikjohn/grid.hpp"

namespace eikjohn {

/// Field/mask files are a JSON header plus a raw little-endian row-major binary
/// payload referenced by the header:
///   {"dim":2,"shape":[ni,nj],"h":...,"origin":[...],"dtype":"f64"|"u8","data":"name.bin"}
/// Doubles are written bit-exactly; round-trips are byte-identical.
void save_field(const GridField& f, const std::string& json_path);
GridField load_field(const std::string& json_path);

void save_mask(const RegionMask& m, const std::string& json_path);
RegionMask load_mask(const std::string& json_path);

/// CSV export: header then one row per cell, "i,j[,k],x,y[,z],value",
/// values printed with round-trip precision.
void field_to_csv(const GridField& f, const std::string& csv_path);
void mask_to_csv(const RegionMask& m, const std::string& csv_path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace eikjohn
