use thiserror::Error;

/// Inclusive integer range of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub const fn new(lo: u64, hi: u64) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(self) -> bool {
        self.lo > self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{0} must be at least 1")]
    ZeroPeriod(&'static str),
    #[error("interval {0} is empty")]
    EmptyInterval(&'static str),
    #[error("probability {0} must lie in [0, 1]")]
    Probability(&'static str),
    #[error("{name} must equal the upper bound of its execution interval ({expected})")]
    WorstCase { name: &'static str, expected: u64 },
}

/// Timing and environment parameters of the vehicle model. Times are in
/// steps (milliseconds).
#[derive(Debug, Clone, PartialEq)]
pub struct AVParams {
    pub camera_period: u64,
    pub sign_rec_period: u64,
    pub obstacle_period: u64,
    pub speed_period: u64,

    pub exec_camera: Interval,
    pub exec_sign_rec: Interval,
    pub exec_controller: Interval,
    pub exec_vehicle_dyn: Interval,

    pub w_cmr: u64,
    pub w_sr: u64,
    pub w_ctrl: u64,
    pub w_vd: u64,

    /// Maximum spread of the controller's five inputs within a frame.
    pub input_sync: u64,
    /// Maximum spread of the controller's four outputs within a frame.
    pub output_sync: u64,
    /// Open windows for sign input to torque output, camera trigger to sign
    /// output, and camera trigger to speed output.
    pub e2e_ctrl_vd: Interval,
    pub e2e_cmr_sr: Interval,
    pub e2e_cmr_vd: Interval,

    pub sporadic_dwell: u64,
    /// Extra delay before leaving emergency, on top of the dwell.
    pub emergency_exit: Interval,

    /// Sign-recognition latency from trigger to detection.
    pub sign_detect: Interval,
    /// Controller reaction from detection to mode change.
    pub decision: Interval,
    pub turn_reaction: Interval,
    pub brake_reaction: Interval,
    /// Deceleration in m/s^2.
    pub brake_decel: u64,

    /// Probabilities of left, right, stop, accelerate, decelerate, none.
    pub sign_type_prob: [f64; 6],
    pub obstacle_prob: f64,
    /// Cruise speed bounds in m/s.
    pub speed_range: Interval,
    pub speed_jitter: Interval,

    pub seed: u64,
    pub steps: u64,
}

impl Default for AVParams {
    fn default() -> Self {
        AVParams {
            camera_period: 50,
            sign_rec_period: 200,
            obstacle_period: 40,
            speed_period: 30,
            exec_camera: Interval::new(20, 30),
            exec_sign_rec: Interval::new(100, 150),
            exec_controller: Interval::new(100, 150),
            exec_vehicle_dyn: Interval::new(50, 100),
            w_cmr: 30,
            w_sr: 150,
            w_ctrl: 150,
            w_vd: 100,
            input_sync: 40,
            output_sync: 30,
            e2e_ctrl_vd: Interval::new(150, 250),
            e2e_cmr_sr: Interval::new(120, 180),
            e2e_cmr_vd: Interval::new(270, 430),
            sporadic_dwell: 500,
            emergency_exit: Interval::new(1, 40),
            sign_detect: Interval::new(100, 150),
            decision: Interval::new(1, 40),
            turn_reaction: Interval::new(150, 400),
            brake_reaction: Interval::new(60, 180),
            brake_decel: 9,
            sign_type_prob: [1.0 / 6.0; 6],
            obstacle_prob: 0.05,
            speed_range: Interval::new(5, 20),
            speed_jitter: Interval::new(0, 2),
            seed: 42,
            steps: 60_000,
        }
    }
}

impl AVParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, v) in [
            ("camera_period", self.camera_period),
            ("sign_rec_period", self.sign_rec_period),
            ("obstacle_period", self.obstacle_period),
            ("speed_period", self.speed_period),
            ("input_sync", self.input_sync),
            ("output_sync", self.output_sync),
            ("brake_decel", self.brake_decel),
        ] {
            if v == 0 {
                return Err(ParamError::ZeroPeriod(name));
            }
        }
        for (name, i) in [
            ("exec_camera", self.exec_camera),
            ("exec_sign_rec", self.exec_sign_rec),
            ("exec_controller", self.exec_controller),
            ("exec_vehicle_dyn", self.exec_vehicle_dyn),
            ("e2e_ctrl_vd", self.e2e_ctrl_vd),
            ("e2e_cmr_sr", self.e2e_cmr_sr),
            ("e2e_cmr_vd", self.e2e_cmr_vd),
            ("emergency_exit", self.emergency_exit),
            ("sign_detect", self.sign_detect),
            ("decision", self.decision),
            ("turn_reaction", self.turn_reaction),
            ("brake_reaction", self.brake_reaction),
            ("speed_range", self.speed_range),
            ("speed_jitter", self.speed_jitter),
        ] {
            if i.is_empty() {
                return Err(ParamError::EmptyInterval(name));
            }
        }
        if !(0.0..=1.0).contains(&self.obstacle_prob) {
            return Err(ParamError::Probability("obstacle_prob"));
        }
        let total: f64 = self.sign_type_prob.iter().sum();
        if self.sign_type_prob.iter().any(|p| !(0.0..=1.0).contains(p))
            || (total - 1.0).abs() > 1e-9
        {
            return Err(ParamError::Probability("sign_type_prob"));
        }
        for (name, w, exec) in [
            ("w_cmr", self.w_cmr, self.exec_camera),
            ("w_sr", self.w_sr, self.exec_sign_rec),
            ("w_ctrl", self.w_ctrl, self.exec_controller),
            ("w_vd", self.w_vd, self.exec_vehicle_dyn),
        ] {
            if w != exec.hi {
                return Err(ParamError::WorstCase {
                    name,
                    expected: exec.hi,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AVParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_params() {
        let p = AVParams {
            exec_camera: Interval::new(30, 20),
            ..AVParams::default()
        };
        assert_eq!(p.validate(), Err(ParamError::EmptyInterval("exec_camera")));
        let p = AVParams {
            obstacle_prob: 1.5,
            ..AVParams::default()
        };
        assert!(p.validate().is_err());
        let p = AVParams {
            w_vd: 90,
            ..AVParams::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ParamError::WorstCase { name: "w_vd", .. })
        ));
        let p = AVParams {
            camera_period: 0,
            ..AVParams::default()
        };
        assert!(p.validate().is_err());
    }
}
