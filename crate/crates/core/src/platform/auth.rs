//! Password hashing and signed bearer tokens.

use argon2::password_hash::rand_core::OsRng;
use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::Argon2;
use hmac::{Hmac, Mac};
use sha2::Sha256;

type HmacSha256 = Hmac<Sha256>;

pub fn hash_password(password: &str) -> String {
    let salt = SaltString::generate(&mut OsRng);
    Argon2::default()
        .hash_password(password.as_bytes(), &salt)
        .expect("argon2 with default params accepts any password")
        .to_string()
}

pub fn verify_password(password: &str, hash: &str) -> bool {
    PasswordHash::new(hash)
        .map(|parsed| Argon2::default().verify_password(password.as_bytes(), &parsed).is_ok())
        .unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claims {
    pub user_id: i64,
    pub expires_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TokenError {
    #[error("malformed token")]
    Malformed,
    #[error("bad signature")]
    Signature,
    #[error("token expired")]
    Expired,
}

#[derive(Clone)]
pub struct TokenSigner {
    key: Vec<u8>,
    ttl_secs: u64,
}

impl std::fmt::Debug for TokenSigner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TokenSigner").field("ttl_secs", &self.ttl_secs).finish_non_exhaustive()
    }
}

impl TokenSigner {
    pub fn new(secret: &[u8], ttl_secs: u64) -> Self {
        Self {
            key: secret.to_vec(),
            ttl_secs,
        }
    }

    fn mac(&self) -> HmacSha256 {
        HmacSha256::new_from_slice(&self.key).expect("hmac takes keys of any length")
    }

    /// `v1.<user>.<expiry>.<hex hmac>`
    pub fn issue(&self, user_id: i64, now: u64) -> (String, Claims) {
        let claims = Claims {
            user_id,
            expires_at: now + self.ttl_secs,
        };
        let body = format!("v1.{}.{}", claims.user_id, claims.expires_at);
        let mut mac = self.mac();
        mac.update(body.as_bytes());
        let sig = hex::encode(mac.finalize().into_bytes());
        (format!("{body}.{sig}"), claims)
    }

    pub fn verify(&self, token: &str, now: u64) -> Result<Claims, TokenError> {
        let (body, sig) = token.rsplit_once('.').ok_or(TokenError::Malformed)?;
        let mut parts = body.split('.');
        let (Some("v1"), Some(user), Some(exp), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(TokenError::Malformed);
        };
        let sig = hex::decode(sig).map_err(|_| TokenError::Malformed)?;
        let mut mac = self.mac();
        mac.update(body.as_bytes());
        mac.verify_slice(&sig).map_err(|_| TokenError::Signature)?;
        let claims = Claims {
            user_id: user.parse().map_err(|_| TokenError::Malformed)?,
            expires_at: exp.parse().map_err(|_| TokenError::Malformed)?,
        };
        if now >= claims.expires_at {
            return Err(TokenError::Expired);
        }
        Ok(claims)
    }

    /// Stable opaque id for exports; unrelated to the database id.
    pub fn pseudonym(&self, scope: &str, user_id: i64) -> String {
        let mut mac = self.mac();
        mac.update(format!("pseudonym.{scope}.{user_id}").as_bytes());
        let digest = mac.finalize().into_bytes();
        format!("s-{}", hex::encode(&digest[..6]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passwords() {
        let h = hash_password("correct horse");
        assert!(h.starts_with("$argon2id$"));
        assert!(verify_password("correct horse", &h));
        assert!(!verify_password("wrong", &h));
        assert!(!verify_password("x", "not a hash"));
    }

    #[test]
    fn tokens() {
        let s = TokenSigner::new(b"0123456789abcdef", 8 * 3600);
        let (tok, claims) = s.issue(42, 1_000);
        assert_eq!(claims.expires_at, 1_000 + 28_800);
        assert_eq!(s.verify(&tok, 1_001).unwrap().user_id, 42);
        assert_eq!(s.verify(&tok, 29_800), Err(TokenError::Expired));
        let forged = tok.replacen("v1.42.", "v1.43.", 1);
        assert_eq!(s.verify(&forged, 1_001), Err(TokenError::Signature));
        assert_eq!(s.verify("garbage", 0), Err(TokenError::Malformed));
        let other = TokenSigner::new(b"another key entirely", 8 * 3600);
        assert_eq!(other.verify(&tok, 1_001), Err(TokenError::Signature));
    }

    #[test]
    fn pseudonyms_are_stable_and_scoped() {
        let s = TokenSigner::new(b"k", 1);
        assert_eq!(s.pseudonym("a1", 7), s.pseudonym("a1", 7));
        assert_ne!(s.pseudonym("a1", 7), s.pseudonym("a2", 7));
        assert_eq!(s.pseudonym("a1", 7).len(), 14);
    }
}
