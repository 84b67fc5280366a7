//! Channel, antenna and per-voxel received power.

mod antenna;
mod channel;

pub use antenna::{AntennaModel, BeamConfig, BeamPattern, BeamPatternCodebook};
pub use channel::{
    mix, ChannelCoefficients, ChannelParams, Environment, LosProbabilityCoefficients,
    PathLossCoefficients,
};

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BaseStation, Point3};

/// `10 log10(3276)`: 273 resource blocks of 12 subcarriers.
pub const SUBCARRIER_OFFSET_DB: f64 = 35.15343893088381;

/// Everything needed to turn a (station, beam, voxel) triple into received
/// power.
///
/// `power_offset_db` is subtracted from the transmit power before the
/// threshold comparison, so the threshold reads as a per-subcarrier level
/// (RSRP-like) while `transmit_power_dbm` stays the total carrier power.
/// The default spreads 46 dBm over the 3276 subcarriers of a 100 MHz carrier
/// at 30 kHz spacing; set it to 0 for the raw total-power budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioModel {
    pub channel: ChannelParams,
    pub antenna: AntennaModel,
    pub transmit_power_dbm: f64,
    pub power_offset_db: f64,
}

impl Default for RadioModel {
    fn default() -> Self {
        Self {
            channel: ChannelParams::default(),
            antenna: AntennaModel::default(),
            transmit_power_dbm: 46.0,
            power_offset_db: SUBCARRIER_OFFSET_DB,
        }
    }
}

impl RadioModel {
    pub fn effective_power_dbm(&self) -> f64 {
        self.transmit_power_dbm - self.power_offset_db
    }

    /// Received power in dBm at `voxel` from `station` transmitting on `beam`.
    pub fn received_power(&self, station: &BaseStation, beam: &BeamConfig, voxel: &Point3) -> Result<f64> {
        let geom = LinkGeometry::between(&station.position, voxel)?;
        let (az, el) = geom.offsets(beam);
        let pl = self.channel.path_loss(geom.d_2d, geom.h_t)?;
        Ok(link_budget(
            self.effective_power_dbm(),
            self.antenna.gain_dbi(beam, az, el),
            pl,
        ))
    }
}

/// `P_T + G - PL` (dBm, dBi, dB).
pub fn link_budget(transmit_power_dbm: f64, gain_dbi: f64, path_loss_db: f64) -> f64 {
    transmit_power_dbm + gain_dbi - path_loss_db
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Beam-independent geometry of a station-to-voxel link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d_2d: f64,
    pub h_t: f64,
    /// Heading of the voxel seen from the station, radians from +x.
    pub heading: f64,
    /// Elevation of the voxel above the station's horizon, radians.
    pub elevation: f64,
}

impl LinkGeometry {
    pub fn between(station: &Point3, voxel: &Point3) -> Result<Self> {
        let dx = voxel.x - station.x;
        let dy = voxel.y - station.y;
        let dz = voxel.z - station.z;
        let d_2d = dx.hypot(dy);
        if d_2d == 0.0 && dz == 0.0 {
            return Err(Error::SingularGeometry(
                "voxel coincides with the station".into(),
            ));
        }
        Ok(Self {
            d_2d,
            h_t: dz.abs(),
            heading: if d_2d == 0.0 { 0.0 } else { dy.atan2(dx) },
            elevation: dz.atan2(d_2d),
        })
    }

    /// Horizontal offset from `azimuth_rad`; zero straight above or below.
    pub fn azimuth_offset(&self, azimuth_rad: f64) -> f64 {
        if self.d_2d == 0.0 {
            0.0
        } else {
            wrap_angle(self.heading - azimuth_rad)
        }
    }

    pub fn offsets(&self, beam: &BeamConfig) -> (f64, f64) {
        (
            self.azimuth_offset(beam.azimuth_rad()),
            elevation_offset(self.elevation, beam),
        )
    }
}

pub(crate) fn elevation_offset(elevation: f64, beam: &BeamConfig) -> f64 {
    wrap_angle(elevation - beam.tilt_rad())
}

/// Signed (horizontal, vertical) angles in radians between the beam's
/// boresight and the station-to-voxel direction, each in `(-pi, pi]`.
pub fn boresight_offsets(station: &BaseStation, beam: &BeamConfig, voxel: &Point3) -> Result<(f64, f64)> {
    Ok(LinkGeometry::between(&station.position, voxel)?.offsets(beam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn station() -> BaseStation {
        BaseStation::new(1, 0.0, 0.0, 30.0)
    }

    #[test]
    fn wrap() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-0.25), -0.25, epsilon = 0.0);
    }

    #[test]
    fn on_boresight() {
        let beam = BeamConfig::new(30.0, 10.0, 45.0, 90.0).unwrap();
        let v = Point3::new(0.0, 100.0, 130.0);
        let (az, el) = boresight_offsets(&station(), &beam, &v).unwrap();
        assert_abs_diff_eq!(az, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(el, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn overhead_zenith() {
        let beam = BeamConfig::new(30.0, 10.0, 90.0, 17.0).unwrap();
        let (az, el) = boresight_offsets(&station(), &beam, &Point3::new(0.0, 0.0, 200.0)).unwrap();
        assert_eq!(az, 0.0);
        assert_abs_diff_eq!(el, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn behind_heading() {
        let beam = BeamConfig::new(30.0, 10.0, 0.0, 0.0).unwrap();
        for (x, y) in [(-100.0, 1.0), (-100.0, -1.0), (-5.0, 80.0), (-5.0, -80.0)] {
            let v = Point3::new(x, y, 30.0);
            let (az, _) = boresight_offsets(&station(), &beam, &v).unwrap();
            // vector-angle oracle: angle between heading (1, 0) and (x, y)
            let oracle = (x / (x * x + y * y).sqrt()).acos();
            assert_abs_diff_eq!(az.abs(), oracle, epsilon = 1e-12);
            assert!(az.abs() > PI / 2.0);
        }
    }

    #[test]
    fn coincident_is_singular() {
        let beam = BeamConfig::new(30.0, 10.0, 0.0, 0.0).unwrap();
        let v = Point3::new(0.0, 0.0, 30.0);
        assert!(matches!(
            boresight_offsets(&station(), &beam, &v),
            Err(Error::SingularGeometry(_))
        ));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(link_budget(46.0, 0.0, 100.0), -54.0);
    }

    #[test]
    fn main_beats_side_by_gain_gap() {
        let radio = RadioModel::default();
        let s = station();
        let v = Point3::new(500.0, 0.0, 80.0);
        let on = BeamConfig::new(40.0, 20.0, 5.0, 0.0).unwrap();
        let off = BeamConfig::new(40.0, 20.0, 5.0, 180.0).unwrap();
        let p_on = radio.received_power(&s, &on, &v).unwrap();
        let p_off = radio.received_power(&s, &off, &v).unwrap();
        let gap = radio.antenna.main_lobe_dbi(&on) - radio.antenna.side_lobe_dbi();
        assert_abs_diff_eq!(p_on - p_off, gap, epsilon = 1e-9);
    }

    #[test]
    fn composition() {
        let radio = RadioModel::default();
        let s = station();
        let v = Point3::new(300.0, -400.0, 12.0);
        let beam = BeamConfig::new(60.0, 15.0, -3.0, 300.0).unwrap();
        let d2 = 500.0;
        let ht = 18.0;
        let p = radio.channel.los_probability(d2, ht);
        let pl = p * radio.channel.los_path_loss(d2, ht).unwrap()
            + (1.0 - p) * radio.channel.nlos_path_loss(d2, ht).unwrap();
        let heading = (-400f64).atan2(300.0);
        let az = wrap_angle(heading - 300f64.to_radians());
        let el = (-18f64).atan2(500.0) + 3f64.to_radians();
        let g = radio.antenna.gain_dbi(&beam, az, el);
        let expect = 46.0 - 10.0 * 3276f64.log10() + g - pl;
        assert_abs_diff_eq!(radio.received_power(&s, &beam, &v).unwrap(), expect, epsilon = 1e-9);
    }
}
