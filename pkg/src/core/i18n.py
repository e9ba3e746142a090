# -*- coding: utf-8 -*-
"""
多语言国际化模块

- 命令行报告的表头、状态与提示支持中英文
- 语言由配置项 language 或 --lang 选择
"""

import logging
from typing import Dict, Optional

logger = logging.getLogger(__name__)


# 语言代码
LANG_ZH_CN = 'zh_CN'
LANG_EN_US = 'en_US'

# 翻译字典
TRANSLATIONS: Dict[str, Dict[str, str]] = {
    # ========== 通用 ==========
    'status_ok': {
        LANG_ZH_CN: '✅ 通过',
        LANG_EN_US: '✅ OK',
    },
    'status_failed': {
        LANG_ZH_CN: '❌ 失败',
        LANG_EN_US: '❌ FAILED',
    },
    'status_infeasible': {
        LANG_ZH_CN: '⛔ 不可行',
        LANG_EN_US: '⛔ Infeasible',
    },
    'col_name': {
        LANG_ZH_CN: '项目',
        LANG_EN_US: 'Item',
    },
    'col_value': {
        LANG_ZH_CN: '数值',
        LANG_EN_US: 'Value',
    },

    # ========== solve / dual ==========
    'title_solve': {
        LANG_ZH_CN: '静态最优输运',
        LANG_EN_US: 'Static optimal transport',
    },
    'title_dual': {
        LANG_ZH_CN: 'Kantorovich 对偶核验',
        LANG_EN_US: 'Kantorovich duality check',
    },
    'value': {
        LANG_ZH_CN: '最优值 u_p(ℓ_p)',
        LANG_EN_US: 'Optimal value u_p(ℓ_p)',
    },
    'ell_p': {
        LANG_ZH_CN: 'ℓ_p 距离',
        LANG_EN_US: 'ℓ_p distance',
    },
    'gap': {
        LANG_ZH_CN: '对偶间隙',
        LANG_EN_US: 'Duality gap',
    },
    'dual_value': {
        LANG_ZH_CN: '对偶值',
        LANG_EN_US: 'Dual value',
    },
    'dual': {
        LANG_ZH_CN: '对偶值',
        LANG_EN_US: 'Dual value',
    },
    'primal': {
        LANG_ZH_CN: '原始值',
        LANG_EN_US: 'Primal value',
    },
    'p': {
        LANG_ZH_CN: '指数 p',
        LANG_EN_US: 'Exponent p',
    },
    'max_violation': {
        LANG_ZH_CN: '势的最大违例',
        LANG_EN_US: 'Max potential violation',
    },
    'failed': {
        LANG_ZH_CN: '失败项',
        LANG_EN_US: 'Failed checks',
    },
    'plan': {
        LANG_ZH_CN: '运输计划',
        LANG_EN_US: 'Transport plan',
    },
    'steepening': {
        LANG_ZH_CN: '陡化扰动 ε',
        LANG_EN_US: 'Steepening ε',
    },

    # ========== feasible ==========
    'title_feasible': {
        LANG_ZH_CN: '因果耦合可行性',
        LANG_EN_US: 'Causal coupling feasibility',
    },
    'cut': {
        LANG_ZH_CN: '违例源子集',
        LANG_EN_US: 'Violating source subset',
    },
    'cut_mass': {
        LANG_ZH_CN: 'μ(A) / ν(N(A))',
        LANG_EN_US: 'μ(A) / ν(N(A))',
    },
    'flow_value': {
        LANG_ZH_CN: '最大流值',
        LANG_EN_US: 'Max-flow value',
    },
    'feasible': {
        LANG_ZH_CN: '可行',
        LANG_EN_US: 'Feasible',
    },

    # ========== interpolate / speed ==========
    'title_interpolate': {
        LANG_ZH_CN: '测地插值',
        LANG_EN_US: 'Geodesic interpolation',
    },
    'title_speed': {
        LANG_ZH_CN: '路径因果速度',
        LANG_EN_US: 'Path causal speed',
    },
    'path_action': {
        LANG_ZH_CN: '路径作用量',
        LANG_EN_US: 'Path action',
    },
    'interval': {
        LANG_ZH_CN: '区间',
        LANG_EN_US: 'Interval',
    },
    'speed': {
        LANG_ZH_CN: '速度',
        LANG_EN_US: 'Speed',
    },
    'curves': {
        LANG_ZH_CN: '曲线数',
        LANG_EN_US: 'Curves',
    },
    'speeds': {
        LANG_ZH_CN: '区间速度',
        LANG_EN_US: 'Interval speeds',
    },
    'support_contained': {
        LANG_ZH_CN: '支撑包含于 J(spt μ0, spt μ1)',
        LANG_EN_US: 'Support inside J(spt μ0, spt μ1)',
    },

    # ========== bb / cci ==========
    'title_bb': {
        LANG_ZH_CN: 'Benamou–Brenier 核验',
        LANG_EN_US: 'Benamou–Brenier check',
    },
    'title_cci': {
        LANG_ZH_CN: '因果连续性不等式检查',
        LANG_EN_US: 'Causal continuity inequality check',
    },
    'static_value': {
        LANG_ZH_CN: '静态值',
        LANG_EN_US: 'Static value',
    },
    'dynamic_action': {
        LANG_ZH_CN: '动态作用量',
        LANG_EN_US: 'Dynamic action',
    },
    'merge_count': {
        LANG_ZH_CN: '原子合并次数',
        LANG_EN_US: 'Atom merges',
    },
    'merge_slack': {
        LANG_ZH_CN: '合并余量',
        LANG_EN_US: 'Merge slack',
    },
    'min_residual': {
        LANG_ZH_CN: '最小残差',
        LANG_EN_US: 'Min residual',
    },
    'tests': {
        LANG_ZH_CN: '测试函数数',
        LANG_EN_US: 'Test functions',
    },

    # ========== hopflax ==========
    'title_hopflax': {
        LANG_ZH_CN: 'Hopf–Lax 半群性质',
        LANG_EN_US: 'Hopf–Lax semigroup properties',
    },
    'property': {
        LANG_ZH_CN: '性质',
        LANG_EN_US: 'Property',
    },
    'lipschitz': {
        LANG_ZH_CN: 't 方向 Lipschitz 常数',
        LANG_EN_US: 'Lipschitz constant in t',
    },
    'hj_min_slack': {
        LANG_ZH_CN: 'HJ 最小余量',
        LANG_EN_US: 'HJ min slack',
    },
    'L': {
        LANG_ZH_CN: '声称陡度 L',
        LANG_EN_US: 'Claimed steepness L',
    },
    'steepness': {
        LANG_ZH_CN: 'Q_t f 的陡度',
        LANG_EN_US: 'Steepness of Q_t f',
    },
    'monotone': {
        LANG_ZH_CN: '关于 t 单调',
        LANG_EN_US: 'Monotone in t',
    },
    'young_bound_ok': {
        LANG_ZH_CN: 'Young 上界',
        LANG_EN_US: 'Young bound',
    },
    'maximizer_bound': {
        LANG_ZH_CN: '最大化元范围',
        LANG_EN_US: 'Maximizer bound',
    },

    # ========== 错误提示 ==========
    'err_problem_file': {
        LANG_ZH_CN: '问题文件错误',
        LANG_EN_US: 'Problem file error',
    },
    'err_violation': {
        LANG_ZH_CN: '性质违例',
        LANG_EN_US: 'Property violation',
    },
    'csv_written': {
        LANG_ZH_CN: 'CSV 已写入',
        LANG_EN_US: 'CSV written',
    },

    # ========== 批量 ==========
    'batch_instance': {
        LANG_ZH_CN: '实例',
        LANG_EN_US: 'Instance',
    },
    'batch_summary': {
        LANG_ZH_CN: '批量结束，各实例退出码',
        LANG_EN_US: 'Batch finished, exit codes',
    },
}


class I18n:
    """国际化管理器（类级状态，进程内单一语言）"""

    _current_lang: str = LANG_ZH_CN

    @classmethod
    def set_language(cls, lang: str) -> bool:
        """设置当前语言

        Args:
            lang: 语言代码 (zh_CN 或 en_US)

        Returns:
            是否设置成功
        """
        if lang not in [LANG_ZH_CN, LANG_EN_US]:
            logger.warning(f"不支持的语言: {lang}")
            return False

        if lang != cls._current_lang:
            cls._current_lang = lang
            logger.debug(f"语言已切换: {lang}")
        return True

    @classmethod
    def t(cls, key: str, default: str = '') -> str:
        """翻译文本

        Args:
            key: 翻译键
            default: 默认值（如果找不到翻译）

        Returns:
            翻译后的文本
        """
        translation = TRANSLATIONS.get(key, {})
        if not translation:
            logger.debug(f"未找到翻译: {key}")
            return default or key

        return translation.get(cls._current_lang, translation.get(LANG_ZH_CN, default or key))


# 便捷函数
def t(key: str, default: str = '') -> str:
    """翻译快捷函数

    使用方法:
        from src.core.i18n import t
        label = t('value')  # 返回 "最优值 u_p(ℓ_p)" 或 "Optimal value u_p(ℓ_p)"
    """
    return I18n.t(key, default)


def set_language(lang: Optional[str]) -> bool:
    """设置语言快捷函数"""
    if not lang:
        return False
    return I18n.set_language(lang)
