#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "chaostune/adaptive.hpp"
#include "chaostune/dataset.hpp"
#include "chaostune/simulation.hpp"
#include "chaostune/surrogate.hpp"

namespace chaostune {

// CSV interchange. Numbers are written in shortest round-trip form so
// import(export(x)) == x bit for bit. Parse errors carry the 1-based line.
//
//   dataset     t,x,v,u,s1,s2,err
//   trajectory  t,x,v,u,qd,e,V,s1,s2,status
//   event log   t,kind,s1,s2,predicted_err,measured_err,attempts,memo_size,new_data_size,post_rmse
//   train log   epoch,lr,train_rmse,test_rmse,batch_size
//   predictions prediction,target

inline constexpr std::string_view kDatasetHeader = "t,x,v,u,s1,s2,err";
inline constexpr std::string_view kTrajectoryHeader = "t,x,v,u,qd,e,V,s1,s2,status";
inline constexpr std::string_view kEventLogHeader =
    "t,kind,s1,s2,predicted_err,measured_err,attempts,memo_size,new_data_size,post_rmse";
inline constexpr std::string_view kTrainLogHeader = "epoch,lr,train_rmse,test_rmse,batch_size";
inline constexpr std::string_view kPredictionsHeader = "prediction,target";

[[nodiscard]] std::string dataset_to_csv(const Dataset& ds);
[[nodiscard]] Dataset dataset_from_csv(std::string_view text);

[[nodiscard]] std::string trajectory_to_csv(const Trajectory& tr);
[[nodiscard]] Trajectory trajectory_from_csv(std::string_view text);

[[nodiscard]] std::string event_log_to_csv(const EventLog& log);
[[nodiscard]] EventLog event_log_from_csv(std::string_view text);

[[nodiscard]] std::string train_log_to_csv(const TrainLog& log);
[[nodiscard]] TrainLog train_log_from_csv(std::string_view text);

struct PredictionPair {
    double prediction = 0.0;
    double target = 0.0;
};

[[nodiscard]] std::string predictions_to_csv(const std::vector<PredictionPair>& rows);
[[nodiscard]] std::vector<PredictionPair> predictions_from_csv(std::string_view text);

/// Whole-file helpers; throw IoFailure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace chaostune
