//! Single-network pipeline shared by monitoring and intervention:
//! null ensemble, signed relations, agent profiles, balance and potentiality.

use serde::{Deserialize, Serialize};

use crate::ensemble::{potentiality_with, Ensemble, Potentiality, PotentialityOptions};
use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;
use crate::signed::{
    classic_balance, importance, infer_signed, social_impact, weighted_balance, AgentProfile, BalanceSummary,
    ImpactOrientation, ImportanceMethod, SignedNetwork, WeightedBalance,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub importance: ImportanceMethod,
    pub orientation: ImpactOrientation,
    pub potentiality: PotentialityOptions,
}

/// Signed relations and profiles of one network.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profiles {
    pub signed: SignedNetwork,
    pub profiles: Vec<AgentProfile>,
}

/// Signed relations against the degree-preserving null ensemble, then
/// importance (plus `boost` per node, if given) and social impact. A network
/// without edges has no relations, so `q = r`.
pub fn profiles(net: &MultiEdgeNetwork, cfg: &AnalysisConfig, boost: Option<&[f64]>) -> Result<Profiles> {
    if net.n() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let signed = if net.m() == 0 {
        SignedNetwork::new(net.node_ids().to_vec(), vec![0.0; net.n() * net.n()])?
    } else {
        infer_signed(net, &Ensemble::build(net)?)?
    };
    let mut r = importance(net, cfg.importance)?;
    if let Some(b) = boost {
        if b.len() != r.len() {
            return Err(Error::InvalidInput(format!(
                "boost vector has {} entries, network has {} nodes",
                b.len(),
                r.len()
            )));
        }
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri += bi);
    }
    let profiles = social_impact(&signed, &r, cfg.orientation)?;
    Ok(Profiles { signed, profiles })
}

/// Everything the `analyze` command reports for one network.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Analysis {
    #[serde(flatten)]
    pub profiles: Profiles,
    pub balance: BalanceSummary,
    pub weighted_balance: WeightedBalance,
    pub potentiality: Potentiality,
}

/// Potentiality of the saturated ensemble, whose propensities reproduce the
/// observed interaction pattern.
pub fn observed_potentiality(net: &MultiEdgeNetwork, opts: &PotentialityOptions) -> Result<Potentiality> {
    potentiality_with(&Ensemble::fit_saturated(net)?, opts)
}

pub fn analyze(net: &MultiEdgeNetwork, cfg: &AnalysisConfig) -> Result<Analysis> {
    let p = profiles(net, cfg, None)?;
    let balance = classic_balance(&p.signed);
    let weighted_balance = weighted_balance(&p.signed, &p.profiles);
    let potentiality = observed_potentiality(net, &cfg.potentiality)?;
    Ok(Analysis {
        profiles: p,
        balance,
        weighted_balance,
        potentiality,
    })
}
