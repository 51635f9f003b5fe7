macro_rules! serde_via_string {
    ($t:ty, $what:literal) => {
        impl serde::Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = <std::borrow::Cow<'de, str>>::deserialize(d)?;
                text.parse().map_err(|_| serde::de::Error::custom(format!("invalid {}: {text}", $what)))
            }
        }
    };
}

pub mod numeric;
pub mod sets;
pub mod expr;
pub mod set_expr;
pub mod problem;
pub mod minimizer;
pub mod checks;
pub mod theorems;
pub mod corpus;
pub mod report;
