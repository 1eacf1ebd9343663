use serde::{Deserialize, Serialize};

use super::{ExecTimeSampler, WorkloadError};
use crate::taskmodel::{Callback, CallbackGraph, GraphEdge};
use crate::time::ms;

/// A callback graph plus an optional per-vertex execution-time sampler.
///
/// On disk this is the callback-graph JSON with an extra `sampler` block;
/// without one, every vertex uses the default uniform `[0.7·wcet, wcet]`
/// sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadTemplate {
    pub callbacks: Vec<Callback>,
    pub edges: Vec<GraphEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<ExecTimeSampler>,
}

impl WorkloadTemplate {
    pub fn new(graph: CallbackGraph, sampler: Option<ExecTimeSampler>) -> Self {
        Self {
            callbacks: graph.callbacks,
            edges: graph.edges,
            sampler,
        }
    }

    pub fn graph(&self) -> CallbackGraph {
        CallbackGraph::new(self.callbacks.clone(), self.edges.clone())
    }

    /// The explicit sampler, or the default one derived from the WCETs.
    pub fn effective_sampler(&self) -> ExecTimeSampler {
        self.sampler
            .clone()
            .unwrap_or_else(|| ExecTimeSampler::default_for(&self.graph()))
    }

    pub fn from_json(text: &str) -> Result<Self, WorkloadError> {
        serde_json::from_str(text).map_err(|e| WorkloadError::Parse(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("template serialization is infallible")
    }

    /// Representative Autoware-like callback graph.
    ///
    /// Nine timer-rooted sub-DAGs with periods 20, 30, 50, 100, 150, 300, 500,
    /// 1000 and 3000 ms (hyper-period 3000 ms) connected by queue edges,
    /// including the localization feedback loop between `ekf_localizer` and
    /// `ndt_scan_matcher`. The LiDAR pipeline joins at two sync callbacks;
    /// the other sub-DAGs fan out to several sinks. Callbacks take at most
    /// 60 ms and the WCET-based total utilization is just under 7.
    /// Topology and WCETs are a stand-in, not measured data.
    pub fn autoware_like() -> Self {
        use Callback as C;
        let callbacks = vec![
            // 20 ms: localization output
            C::timer(1, "ekf_localizer", ms(20), 3_000),
            C::subscription(2, "stop_filter", 4_000),
            C::subscription(3, "twist2accel", 4_000),
            C::subscription(4, "pose_publisher", 3_000),
            C::subscription(5, "tf_broadcaster", 3_000),
            // 30 ms: control
            C::timer(10, "trajectory_follower", ms(30), 5_000),
            C::subscription(11, "vehicle_cmd_gate", 6_000),
            C::subscription(12, "control_validator", 5_000),
            C::subscription(13, "shift_decider", 4_000),
            C::subscription(14, "lane_departure_checker", 7_000),
            C::subscription(15, "obstacle_collision_checker", 7_000),
            // 50 ms: IMU and odometry
            C::timer(20, "imu_corrector", ms(50), 4_000),
            C::subscription(21, "gyro_odometer", 8_000),
            C::subscription(22, "vehicle_velocity_converter", 5_000),
            C::subscription(23, "imu_monitor", 6_000),
            C::subscription(24, "twist_estimator", 7_000),
            C::subscription(25, "odometry_fuser", 8_000),
            // 100 ms: LiDAR pipeline
            C::timer(30, "lidar_sync_timer", ms(100), 5_000),
            C::subscription(31, "crop_box_filter_top", 20_000),
            C::subscription(32, "crop_box_filter_left", 18_000),
            C::sync(33, "concat_data", 12_000),
            C::subscription(34, "voxel_grid_downsample", 18_000),
            C::subscription(35, "ndt_scan_matcher", 25_000),
            C::subscription(36, "ground_filter", 22_000),
            C::sync(37, "occupancy_grid_map", 20_000),
            // 150 ms: camera perception
            C::timer(40, "camera_timer", ms(150), 10_000),
            C::subscription(41, "tensorrt_yolo_front", 50_000),
            C::subscription(42, "roi_cluster_fusion_front", 25_000),
            C::subscription(43, "tensorrt_yolo_rear", 50_000),
            C::subscription(44, "roi_cluster_fusion_rear", 25_000),
            C::subscription(45, "traffic_light_detector", 40_000),
            C::subscription(46, "traffic_light_classifier", 30_000),
            // 300 ms: prediction and behavior velocity modules
            C::timer(50, "map_based_prediction", ms(300), 20_000),
            C::subscription(51, "obstacle_stop_planner", 40_000),
            C::subscription(52, "behavior_velocity_planner", 30_000),
            C::subscription(53, "crosswalk_module", 35_000),
            C::subscription(54, "intersection_module", 35_000),
            // 500 ms: planning
            C::timer(60, "planning_timer", ms(500), 20_000),
            C::subscription(61, "behavior_path_planner", 60_000),
            C::subscription(62, "motion_velocity_smoother", 40_000),
            C::subscription(63, "obstacle_avoidance_planner", 50_000),
            C::subscription(64, "lane_change_module", 60_000),
            // 1000 ms: diagnostics
            C::timer(70, "diagnostics_timer", ms(1000), 10_000),
            C::subscription(71, "system_monitor", 60_000),
            C::subscription(72, "topic_state_monitor", 50_000),
            C::subscription(73, "diagnostic_aggregator", 60_000),
            C::subscription(74, "emergency_handler", 30_000),
            // 3000 ms: map
            C::timer(80, "map_loader_timer", ms(3000), 10_000),
            C::subscription(81, "pointcloud_map_loader", 60_000),
            C::subscription(82, "vector_map_loader", 50_000),
            C::subscription(83, "map_tf_generator", 20_000),
        ];
        use GraphEdge as E;
        let edges = vec![
            E::pubsub(1, 2),
            E::pubsub(1, 3),
            E::pubsub(1, 4),
            E::pubsub(1, 5),
            E::pubsub(10, 11),
            E::pubsub(11, 12),
            E::pubsub(10, 13),
            E::pubsub(10, 14),
            E::pubsub(10, 15),
            E::pubsub(20, 21),
            E::pubsub(21, 22),
            E::pubsub(20, 23),
            E::pubsub(20, 24),
            E::pubsub(20, 25),
            E::pubsub(30, 31),
            E::pubsub(30, 32),
            E::pubsub(31, 33),
            E::pubsub(32, 33),
            E::pubsub(33, 34),
            E::pubsub(34, 35),
            E::pubsub(33, 36),
            E::pubsub(36, 37),
            E::pubsub(34, 37),
            E::pubsub(40, 41),
            E::pubsub(41, 42),
            E::pubsub(40, 43),
            E::pubsub(43, 44),
            E::pubsub(40, 45),
            E::pubsub(45, 46),
            E::pubsub(50, 51),
            E::pubsub(51, 52),
            E::pubsub(50, 53),
            E::pubsub(50, 54),
            E::pubsub(60, 61),
            E::pubsub(61, 62),
            E::pubsub(60, 63),
            E::pubsub(60, 64),
            E::pubsub(70, 71),
            E::pubsub(70, 72),
            E::pubsub(70, 73),
            E::pubsub(73, 74),
            E::pubsub(80, 81),
            E::pubsub(80, 82),
            E::pubsub(82, 83),
            // data handed over through member queues or take-API reads
            E::queue(35, 1),
            E::queue(1, 35),
            E::queue(21, 1),
            E::queue(25, 1),
            E::queue(3, 10),
            E::queue(62, 10),
            E::queue(37, 61),
            E::queue(42, 50),
            E::queue(44, 50),
            E::queue(46, 52),
            E::queue(52, 61),
            E::queue(83, 35),
            E::queue(74, 11),
        ];
        Self {
            callbacks,
            edges,
            sampler: None,
        }
    }
}
