/** Runtime configuration: the registry base URL can be set per-deployment
 *  without rebuilding, via `window.MX_REGISTRY_URL` (inline script in
 *  index.html) or a `?registry=` query parameter. */

declare global {
  interface Window {
    MX_REGISTRY_URL?: string;
  }
}

export const DEFAULT_REGISTRY_URL = 'http://127.0.0.1:5100';

export function registryBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('registry');
  const raw = fromQuery ?? window.MX_REGISTRY_URL ?? DEFAULT_REGISTRY_URL;
  return raw.replace(/\/+$/, '');
}
