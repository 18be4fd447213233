//! Audit records of what the editing engine touched and how hard it had to
//! work. These serialize into the report pipeline with the same canonical
//! JSON rules as datasets.

use serde::{Deserialize, Serialize};

/// One MLP output neuron: a column of a block's FF2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronRef {
    pub layer: usize,
    pub column: usize,
}

/// Outcome of editing a single neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronEditRecord {
    pub neuron: NeuronRef,
    /// Projection round-trips performed; 0 means the unedited neuron already
    /// satisfied the rank tolerance.
    pub iterations: usize,
    /// Token rank inside the neuron's vocabulary projection after the edit.
    pub final_rank: usize,
    /// Last inserted logit value; for a 0-iteration edit this is the token's
    /// existing in-neuron logit.
    pub final_logit: f64,
    /// Whether the edit reached the rank tolerance before the iteration cap.
    pub converged: bool,
}

/// What happened at one layer during an unlearn call. Every layer of the
/// model gets a record; unselected layers carry `selected: false` and an
/// empty neuron list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerEditRecord {
    pub layer: usize,
    /// Whether the layer's hidden-state rank was below the threshold and the
    /// layer was therefore edited.
    pub selected: bool,
    /// Hidden-state token rank at this layer before any edit of this call.
    pub initial_rank: usize,
    /// Hidden-state token rank at this layer after all edits of this call.
    pub final_rank: usize,
    pub neurons: Vec<NeuronEditRecord>,
    /// Set when the layer ran out of neuron budget (or candidates) while the
    /// hidden-state rank was still below the threshold.
    pub budget_exhausted: bool,
}

/// Full audit of one unlearn-token call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditRecord {
    /// Identifier of the target this token belongs to; empty for direct
    /// token-level calls.
    pub target_id: String,
    /// The vocabulary id that was demoted.
    pub token: usize,
    /// Position of the token within the target's secret, when unlearned
    /// through a target.
    pub secret_pos: Option<usize>,
    pub layers: Vec<LayerEditRecord>,
    /// True when any layer exhausted its budget.
    pub budget_exhausted: bool,
}

impl EditRecord {
    /// Total neurons edited across all layers.
    pub fn neurons_edited(&self) -> usize {
        self.layers.iter().map(|l| l.neurons.len()).sum()
    }

    /// All edited neuron references, in edit order.
    pub fn edited_neurons(&self) -> Vec<NeuronRef> {
        self.layers.iter().flat_map(|l| l.neurons.iter().map(|n| n.neuron)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EditRecord {
        EditRecord {
            target_id: "forget-003".into(),
            token: 17,
            secret_pos: Some(0),
            layers: vec![
                LayerEditRecord {
                    layer: 0,
                    selected: false,
                    initial_rank: 40,
                    final_rank: 41,
                    neurons: vec![],
                    budget_exhausted: false,
                },
                LayerEditRecord {
                    layer: 1,
                    selected: true,
                    initial_rank: 1,
                    final_rank: 9,
                    neurons: vec![NeuronEditRecord {
                        neuron: NeuronRef { layer: 1, column: 212 },
                        iterations: 3,
                        final_rank: 470,
                        final_logit: -16.900000000000002,
                        converged: true,
                    }],
                    budget_exhausted: false,
                },
            ],
            budget_exhausted: false,
        }
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let rec = sample();
        let json = tokenizer_data::canon::to_canonical_json(&rec).unwrap();
        let back: EditRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
        let again = tokenizer_data::canon::to_canonical_json(&back).unwrap();
        assert_eq!(json, again);
    }

    #[test]
    fn helpers_flatten_the_edit_lists() {
        let rec = sample();
        assert_eq!(rec.neurons_edited(), 1);
        assert_eq!(rec.edited_neurons(), vec![NeuronRef { layer: 1, column: 212 }]);
    }
}
